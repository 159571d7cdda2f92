#include "heatup/schedule.hpp"

#include <cstdio>

#include "heatup/errors.hpp"

namespace heatup {

void TemperatureSchedule::validate() const {
    if (mode == ScheduleMode::step) {
        if (phases.empty()) throw ArgumentError("schedule: no phases");
        for (const auto& p : phases) {
            if (p.alpha <= 0.0) throw ArgumentError("schedule: alpha must be > 0");
            if (p.lr <= 0.0) throw ArgumentError("schedule: lr must be > 0");
            if (p.epochs < 1) throw ArgumentError("schedule: phase epochs must be >= 1");
        }
    } else {
        if (ramp_alpha_start <= 0.0 || ramp_alpha_end <= 0.0)
            throw ArgumentError("schedule: ramp alphas must be > 0");
        if (ramp_lr <= 0.0) throw ArgumentError("schedule: ramp lr must be > 0");
        if (ramp_epochs < 1) throw ArgumentError("schedule: ramp epochs must be >= 1");
    }
}

std::size_t TemperatureSchedule::total_epochs() const {
    if (mode == ScheduleMode::ramp) return ramp_epochs;
    std::size_t total = 0;
    for (const auto& p : phases) total += p.epochs;
    return total;
}

std::size_t TemperatureSchedule::phase_of(std::size_t epoch) const {
    if (mode == ScheduleMode::ramp) return 0;
    std::size_t acc = 0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        acc += phases[i].epochs;
        if (epoch < acc) return i;
    }
    throw ArgumentError("schedule: epoch " + std::to_string(epoch) + " past end");
}

bool TemperatureSchedule::is_phase_start(std::size_t epoch) const {
    if (mode == ScheduleMode::ramp) return epoch == 0;
    std::size_t acc = 0;
    for (const auto& p : phases) {
        if (epoch == acc) return true;
        acc += p.epochs;
    }
    return false;
}

double TemperatureSchedule::alpha_at(std::size_t epoch) const {
    if (mode == ScheduleMode::step) return phases[phase_of(epoch)].alpha;
    if (epoch >= ramp_epochs) throw ArgumentError("schedule: epoch past ramp end");
    if (epoch == 0) return ramp_alpha_start;
    if (epoch + 1 == ramp_epochs) return ramp_alpha_end;
    // Linear in temperature T = 1/alpha, endpoints exact.
    double t0 = 1.0 / ramp_alpha_start, t1 = 1.0 / ramp_alpha_end;
    double frac = static_cast<double>(epoch) / static_cast<double>(ramp_epochs - 1);
    return 1.0 / (t0 + (t1 - t0) * frac);
}

double TemperatureSchedule::lr_at(std::size_t epoch) const {
    if (mode == ScheduleMode::ramp) {
        if (epoch >= ramp_epochs) throw ArgumentError("schedule: epoch past ramp end");
        return ramp_lr;
    }
    return phases[phase_of(epoch)].lr;
}

TemperatureSchedule TemperatureSchedule::single_phase(double alpha, double lr,
                                                      std::size_t epochs) {
    TemperatureSchedule s;
    s.phases = {{alpha, lr, epochs}};
    return s;
}

TemperatureSchedule TemperatureSchedule::heat_up(double alpha_start, double alpha_end, double lr,
                                                 std::size_t epochs_start,
                                                 std::size_t epochs_fine) {
    TemperatureSchedule s;
    s.phases = {{alpha_start, lr, epochs_start}, {alpha_end, lr / 10.0, epochs_fine}};
    return s;
}

std::string TrainingLog::to_csv() const {
    std::string out = "epoch,alpha,lr,mean_loss,train_acc\n";
    char buf[160];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", r.epoch, r.alpha, r.lr,
                      r.mean_loss, r.train_acc);
        out += buf;
    }
    return out;
}

TrainerState::TrainerState(const ArchDescriptor& a, double head_alpha, std::uint64_t seed)
    : arch(a),
      net(a),
      head(a.embedding_dim, a.num_classes, a.weight_norm, head_alpha),
      opt(0.05, 0.9),
      rng(seed) {}

TrainerState make_trainer(const ArchDescriptor& arch, double head_alpha, std::uint64_t seed) {
    TrainerState st(arch, head_alpha, seed);
    init_params(st.net, st.head, st.rng);
    return st;
}

TrainingLog run_schedule(TrainerState& st, const SampleBatch& train,
                         const TemperatureSchedule& sched, const TrainOptions& opts) {
    sched.validate();
    if (train.size() == 0) throw ArgumentError("run_schedule: empty dataset");
    if (opts.batch_size < 1) throw ArgumentError("run_schedule: batch_size must be >= 1");
    st.opt.momentum = opts.momentum;

    const std::size_t total = sched.total_epochs();
    std::size_t last = total;
    if (opts.max_epochs_this_run > 0)
        last = std::min(total, st.next_epoch + opts.max_epochs_this_run);

    TrainingLog log;
    std::vector<std::size_t> order(train.size());
    for (std::size_t epoch = st.next_epoch; epoch < last; ++epoch) {
        if (sched.mode == ScheduleMode::step && sched.is_phase_start(epoch))
            st.opt.reset_velocity();
        const double alpha = sched.alpha_at(epoch);
        st.opt.lr = sched.lr_at(epoch);
        st.head.alpha = alpha;

        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        st.rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t seen = 0, correct = 0;
        for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
            std::size_t end = std::min(order.size(), start + opts.batch_size);
            if (end - start < 2 && order.size() > 1) break;  // drop trailing single sample
            SampleBatch chunk;
            chunk.num_classes = train.num_classes;
            chunk.x = Tensor2D(end - start, train.dim());
            chunk.labels.resize(end - start);
            for (std::size_t i = start; i < end; ++i) {
                const double* src = train.x.row(order[i]);
                double* dst = chunk.x.row(i - start);
                for (std::size_t j = 0; j < train.dim(); ++j) dst[j] = src[j];
                chunk.labels[i - start] = train.labels[order[i]];
            }
            std::size_t batch_correct = 0;
            double loss = train_step(st.net, st.head, chunk, st.opt, alpha, &batch_correct);
            loss_sum += loss * static_cast<double>(end - start);
            correct += batch_correct;
            seen += end - start;
        }
        double mean_loss = seen > 0 ? loss_sum / static_cast<double>(seen) : 0.0;
        double acc = seen > 0 ? static_cast<double>(correct) / static_cast<double>(seen) : 0.0;
        log.records.push_back({epoch + 1, alpha, st.opt.lr, mean_loss, acc});
        st.next_epoch = epoch + 1;
    }
    return log;
}

}  // namespace heatup
