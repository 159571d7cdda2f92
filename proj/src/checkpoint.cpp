#include "heatup/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <vector>

#include "heatup/errors.hpp"

namespace heatup {

namespace {

constexpr char kMagic[8] = {'H', 'U', 'P', 'E', 'M', 'B', '0', '1'};
constexpr int kVersion = 1;

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::vector<unsigned char>& buf, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

double get_f64(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

struct BlockRef {
    std::string name;
    const double* data;
    std::size_t count;
};

// Parameters in declaration order, then BN running stats, then velocity.
std::vector<BlockRef> block_table(const TrainerState& st,
                                  const std::vector<ParamView>& params) {
    std::vector<BlockRef> blocks;
    for (const auto& p : params) blocks.push_back({p.name, p.value, p.count});
    if (st.arch.embed_norm == EmbedNorm::batchnorm) {
        blocks.push_back({"bn.running_mean", st.net.bn.running_mean.data(),
                          st.net.bn.running_mean.size()});
        blocks.push_back({"bn.running_var", st.net.bn.running_var.data(),
                          st.net.bn.running_var.size()});
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& v = st.opt.velocity;
        blocks.push_back({"opt.velocity." + params[i].name,
                          i < v.size() ? v[i].data() : nullptr, params[i].count});
    }
    return blocks;
}

nlohmann::json arch_to_json(const ArchDescriptor& a) {
    return {{"input_dim", a.input_dim},    {"hidden", a.hidden},
            {"embedding_dim", a.embedding_dim}, {"num_classes", a.num_classes},
            {"embed_norm", to_string(a.embed_norm)}, {"weight_norm", to_string(a.weight_norm)},
            {"bn_epsilon", a.bn_epsilon},  {"bn_momentum", a.bn_momentum},
            {"l2_epsilon", a.l2_epsilon}};
}

ArchDescriptor arch_from_json(const nlohmann::json& j) {
    ArchDescriptor a;
    a.input_dim = j.at("input_dim").get<std::size_t>();
    a.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    a.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    a.num_classes = j.at("num_classes").get<std::size_t>();
    a.embed_norm = embed_norm_from_string(j.at("embed_norm").get<std::string>());
    a.weight_norm = weight_norm_from_string(j.at("weight_norm").get<std::string>());
    a.bn_epsilon = j.at("bn_epsilon").get<double>();
    a.bn_momentum = j.at("bn_momentum").get<double>();
    a.l2_epsilon = j.at("l2_epsilon").get<double>();
    return a;
}

}  // namespace

std::uint32_t crc32(const unsigned char* data, std::size_t len) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

void save_checkpoint(const TrainerState& st, const std::string& path,
                     const nlohmann::json& run_config) {
    auto& mut = const_cast<TrainerState&>(st);  // collect_params needs mutable views
    std::vector<ParamView> params = collect_params(mut.net, mut.head);
    std::vector<BlockRef> blocks = block_table(st, params);

    nlohmann::json desc;
    desc["version"] = kVersion;
    desc["arch"] = arch_to_json(st.arch);
    desc["head_alpha"] = st.head.alpha;
    desc["next_epoch"] = st.next_epoch;
    desc["rng_state"] = st.rng.state();
    desc["opt"] = {{"lr", st.opt.lr}, {"momentum", st.opt.momentum}};
    nlohmann::json jblocks = nlohmann::json::array();
    for (const auto& b : blocks) jblocks.push_back({{"name", b.name}, {"count", b.count}});
    desc["blocks"] = jblocks;
    if (!run_config.is_null()) desc["config"] = run_config;
    std::string json_str = desc.dump();

    std::vector<unsigned char> payload;
    put_u32(payload, static_cast<std::uint32_t>(json_str.size()));
    payload.insert(payload.end(), json_str.begin(), json_str.end());
    for (const auto& b : blocks) {
        if (b.data == nullptr) {
            for (std::size_t i = 0; i < b.count; ++i) put_f64(payload, 0.0);
        } else {
            for (std::size_t i = 0; i < b.count; ++i) put_f64(payload, b.data[i]);
        }
    }
    std::uint32_t crc = crc32(payload.data(), payload.size());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    std::vector<unsigned char> tail;
    put_u32(tail, crc);
    out.write(reinterpret_cast<const char*>(tail.data()), 4);
    if (!out) throw IoError("short write to checkpoint: " + path);
}

TrainerState load_checkpoint(const std::string& path, nlohmann::json* run_config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0)
        throw MagicMismatchError("checkpoint magic mismatch in " + path, 0);
    if (bytes.size() < 8 + 4 + 4) throw TruncatedError("checkpoint too short: " + path, bytes.size());

    const unsigned char* payload = bytes.data() + 8;
    const std::size_t payload_len = bytes.size() - 12;
    std::uint32_t stored_crc = get_u32(bytes.data() + bytes.size() - 4);
    if (crc32(payload, payload_len) != stored_crc)
        throw ChecksumError("checkpoint CRC mismatch in " + path, bytes.size() - 4);

    std::uint32_t json_len = get_u32(payload);
    if (4 + static_cast<std::size_t>(json_len) > payload_len)
        throw TruncatedError("checkpoint descriptor truncated in " + path, 8 + 4);
    nlohmann::json desc;
    try {
        desc = nlohmann::json::parse(payload + 4, payload + 4 + json_len);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("checkpoint descriptor is not valid JSON: ") + e.what(), 12);
    }
    int version = desc.at("version").get<int>();
    if (version != kVersion)
        throw VersionError("checkpoint version " + std::to_string(version) + " unsupported", 12);

    ArchDescriptor arch = arch_from_json(desc.at("arch"));
    double head_alpha = desc.at("head_alpha").get<double>();
    TrainerState st(arch, head_alpha, 0);
    st.rng.set_state(desc.at("rng_state").get<std::uint64_t>());
    st.next_epoch = desc.at("next_epoch").get<std::size_t>();
    st.opt.lr = desc.at("opt").at("lr").get<double>();
    st.opt.momentum = desc.at("opt").at("momentum").get<double>();

    std::vector<ParamView> params = collect_params(st.net, st.head);
    std::vector<BlockRef> expected = block_table(st, params);
    const auto& jblocks = desc.at("blocks");
    if (jblocks.size() != expected.size())
        throw ParseError("checkpoint block count " + std::to_string(jblocks.size()) +
                             " vs expected " + std::to_string(expected.size()),
                         12);

    std::size_t off = 4 + json_len;
    std::vector<std::vector<double>> loaded(expected.size());
    for (std::size_t b = 0; b < expected.size(); ++b) {
        const auto& jb = jblocks[b];
        if (jb.at("name").get<std::string>() != expected[b].name ||
            jb.at("count").get<std::size_t>() != expected[b].count)
            throw ParseError("checkpoint block " + std::to_string(b) + " is " +
                                 jb.at("name").get<std::string>() + ", expected " +
                                 expected[b].name,
                             8 + off);
        if (off + expected[b].count * 8 > payload_len)
            throw TruncatedError("checkpoint blocks truncated in " + path, 8 + off);
        loaded[b].resize(expected[b].count);
        for (std::size_t i = 0; i < expected[b].count; ++i, off += 8)
            loaded[b][i] = get_f64(payload + off);
    }

    // Copy into place: params, then bn stats, then velocity.
    std::size_t b = 0;
    for (auto& p : params) {
        std::memcpy(p.value, loaded[b].data(), p.count * sizeof(double));
        ++b;
    }
    if (arch.embed_norm == EmbedNorm::batchnorm) {
        st.net.bn.running_mean = loaded[b++];
        st.net.bn.running_var = loaded[b++];
    }
    st.opt.velocity.clear();
    for (std::size_t i = 0; i < params.size(); ++i) st.opt.velocity.push_back(loaded[b++]);

    if (run_config) *run_config = desc.contains("config") ? desc["config"] : nlohmann::json();
    return st;
}

}  // namespace heatup
