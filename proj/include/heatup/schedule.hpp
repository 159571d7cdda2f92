#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "heatup/batch.hpp"
#include "heatup/model.hpp"
#include "heatup/rng.hpp"

namespace heatup {

enum class ScheduleMode { step, ramp };

struct Phase {
    double alpha;
    double lr;
    std::size_t epochs;
};

// Step mode runs the phases in order with their own alpha and learning
// rate; the canonical heated-up configuration is
// [(16, lr, E1), (4, lr/10, E2)]. Ramp mode interpolates linearly in
// temperature T = 1/alpha across the epoch budget at a fixed learning rate.
struct TemperatureSchedule {
    ScheduleMode mode = ScheduleMode::step;
    std::vector<Phase> phases;

    // ramp mode only
    double ramp_alpha_start = 16.0;
    double ramp_alpha_end = 4.0;
    std::size_t ramp_epochs = 0;
    double ramp_lr = 0.05;

    void validate() const;
    std::size_t total_epochs() const;
    double alpha_at(std::size_t epoch) const;  // epoch is 0-based, < total_epochs
    double lr_at(std::size_t epoch) const;
    // Step mode: index of the phase the epoch falls in; ramp mode: 0.
    std::size_t phase_of(std::size_t epoch) const;
    bool is_phase_start(std::size_t epoch) const;

    static TemperatureSchedule single_phase(double alpha, double lr, std::size_t epochs);
    static TemperatureSchedule heat_up(double alpha_start, double alpha_end, double lr,
                                       std::size_t epochs_start, std::size_t epochs_fine);
};

struct EpochRecord {
    std::size_t epoch;  // 1-based global epoch
    double alpha;
    double lr;
    double mean_loss;
    double train_acc;
};

struct TrainingLog {
    std::vector<EpochRecord> records;
    // CSV with header epoch,alpha,lr,mean_loss,train_acc; floats printed
    // with 17 significant digits so identical runs give identical bytes.
    std::string to_csv() const;
};

struct TrainOptions {
    std::size_t batch_size = 32;
    double momentum = 0.9;
    // Stop after this many epochs in this call (for mid-schedule
    // checkpointing); 0 means run to the end of the schedule.
    std::size_t max_epochs_this_run = 0;
};

// A training run frozen between epochs: everything needed to continue it
// bit-exactly lives here and round-trips through checkpoints.
struct TrainerState {
    ArchDescriptor arch;
    EmbeddingNet net;
    ClassifierHead head;
    SgdMomentum opt;
    Rng rng;
    std::size_t next_epoch = 0;  // global 0-based epoch to run next

    TrainerState(const ArchDescriptor& a, double head_alpha, std::uint64_t seed);
};

// Builds the network + head for arch and Glorot-initializes them from seed.
TrainerState make_trainer(const ArchDescriptor& arch, double head_alpha, std::uint64_t seed);

// Runs the schedule from st.next_epoch onward: per epoch, reshuffles with
// the state RNG, walks batch_size chunks (a trailing chunk of one sample
// is dropped), takes one train_step per chunk, and appends a log record.
// Step mode resets optimizer velocity at every phase start.
TrainingLog run_schedule(TrainerState& st, const SampleBatch& train,
                         const TemperatureSchedule& sched, const TrainOptions& opts);

}  // namespace heatup
