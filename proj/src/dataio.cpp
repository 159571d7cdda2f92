#include "heatup/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <vector>

#include <json.hpp>

#include "heatup/errors.hpp"
#include "heatup/rng.hpp"

namespace heatup {

std::string to_string(SplitMode m) {
    return m == SplitMode::shared_classes ? "shared" : "disjoint";
}

SplitMode split_mode_from_string(const std::string& s) {
    if (s == "shared") return SplitMode::shared_classes;
    if (s == "disjoint") return SplitMode::disjoint_classes;
    throw ArgumentError("unknown split mode '" + s + "' (shared, disjoint)");
}

Dataset gen_blobs(const BlobSpec& spec) {
    if (spec.classes < 2) throw ArgumentError("gen_blobs: need >= 2 classes");
    if (spec.dim == 0 || spec.per_class == 0) throw ArgumentError("gen_blobs: empty spec");
    if (spec.sigma < 0.0) throw ArgumentError("gen_blobs: sigma must be >= 0");
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
        throw ArgumentError("gen_blobs: train_fraction must be in (0, 1)");

    Rng rng(spec.seed);
    const double cos_limit = std::cos(spec.min_angle_deg * 3.14159265358979323846 / 180.0);

    // Unit-direction centers by rejection under the pairwise angle floor.
    Tensor2D centers(spec.classes, spec.dim);
    const std::size_t max_tries = 20000;
    for (std::size_t c = 0; c < spec.classes; ++c) {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < max_tries && !placed; ++attempt) {
            std::vector<double> dir(spec.dim);
            for (double& v : dir) v = rng.normal();
            double n = l2_norm(dir);
            if (n <= 1e-12) continue;
            for (double& v : dir) v /= n;
            bool ok = true;
            for (std::size_t p = 0; p < c && ok; ++p)
                if (dot(dir, centers.row_span(p)) > cos_limit) ok = false;
            if (!ok) continue;
            for (std::size_t j = 0; j < spec.dim; ++j) centers(c, j) = dir[j];
            placed = true;
        }
        if (!placed)
            throw GenerationError("gen_blobs: could not place center " + std::to_string(c) +
                                  " with min angle " + std::to_string(spec.min_angle_deg) +
                                  " deg after " + std::to_string(max_tries) + " tries");
    }

    Tensor2D all(spec.classes * spec.per_class, spec.dim);
    std::vector<int> all_labels(all.rows());
    for (std::size_t c = 0; c < spec.classes; ++c) {
        for (std::size_t s = 0; s < spec.per_class; ++s) {
            std::size_t row = c * spec.per_class + s;
            double* r = all.row(row);
            for (std::size_t j = 0; j < spec.dim; ++j)
                r[j] = centers(c, j) + spec.sigma * rng.normal();
            all_labels[row] = static_cast<int>(c);
        }
    }

    Dataset ds;
    ds.class_count = spec.classes;
    ds.split_mode = spec.split;
    auto copy_rows = [&](SampleBatch& dst, const std::vector<std::size_t>& rows) {
        dst.x = Tensor2D(rows.size(), spec.dim);
        dst.labels.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::memcpy(dst.x.row(i), all.row(rows[i]), spec.dim * sizeof(double));
            dst.labels[i] = all_labels[rows[i]];
        }
    };

    std::vector<std::size_t> train_rows, test_rows;
    if (spec.split == SplitMode::disjoint_classes) {
        std::size_t train_classes = (spec.classes + 1) / 2;
        for (std::size_t row = 0; row < all.rows(); ++row) {
            if (static_cast<std::size_t>(all_labels[row]) < train_classes)
                train_rows.push_back(row);
            else
                test_rows.push_back(row);
        }
        copy_rows(ds.train, train_rows);
        copy_rows(ds.test, test_rows);
        ds.train.num_classes = train_classes;
        ds.test.num_classes = spec.classes;
    } else {
        std::size_t per_train = static_cast<std::size_t>(
            std::lround(spec.train_fraction * static_cast<double>(spec.per_class)));
        per_train = std::clamp<std::size_t>(per_train, 1, spec.per_class - 1);
        for (std::size_t c = 0; c < spec.classes; ++c)
            for (std::size_t s = 0; s < spec.per_class; ++s)
                (s < per_train ? train_rows : test_rows).push_back(c * spec.per_class + s);
        copy_rows(ds.train, train_rows);
        copy_rows(ds.test, test_rows);
        ds.train.num_classes = spec.classes;
        ds.test.num_classes = spec.classes;
    }

    if (spec.split == SplitMode::disjoint_classes) {
        std::set<int> tr(ds.train.labels.begin(), ds.train.labels.end());
        for (int l : ds.test.labels)
            if (tr.count(l))
                throw GenerationError("gen_blobs: disjoint split produced overlapping labels");
    }
    return ds;
}

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& buf, std::size_t off,
                   const std::string& path) {
    if (off + 4 > buf.size())
        throw TruncatedError(path + ": header ends early", buf.size());
    return (static_cast<std::uint32_t>(buf[off]) << 24) |
           (static_cast<std::uint32_t>(buf[off + 1]) << 16) |
           (static_cast<std::uint32_t>(buf[off + 2]) << 8) |
           static_cast<std::uint32_t>(buf[off + 3]);
}

void put_be32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

SampleBatch load_idx(const std::string& images_path, const std::string& labels_path) {
    std::vector<unsigned char> img = read_file(images_path);
    std::uint32_t magic = be32(img, 0, images_path);
    if (magic != 0x00000803u)
        throw MagicMismatchError(images_path + ": image magic 0x" + [&] {
            char b[16];
            std::snprintf(b, sizeof(b), "%08x", magic);
            return std::string(b);
        }() + ", want 0x00000803", 0);
    std::uint32_t n = be32(img, 4, images_path);
    std::uint32_t rows = be32(img, 8, images_path);
    std::uint32_t cols = be32(img, 12, images_path);
    std::size_t pixels = static_cast<std::size_t>(n) * rows * cols;
    if (16 + pixels > img.size())
        throw TruncatedError(images_path + ": declared " + std::to_string(pixels) +
                                 " pixels, file ends early",
                             img.size());

    std::vector<unsigned char> lab = read_file(labels_path);
    std::uint32_t lmagic = be32(lab, 0, labels_path);
    if (lmagic != 0x00000801u)
        throw MagicMismatchError(labels_path + ": label magic 0x" + [&] {
            char b[16];
            std::snprintf(b, sizeof(b), "%08x", lmagic);
            return std::string(b);
        }() + ", want 0x00000801", 0);
    std::uint32_t ln = be32(lab, 4, labels_path);
    if (ln != n)
        throw CountMismatchError(labels_path + ": " + std::to_string(ln) + " labels vs " +
                                     std::to_string(n) + " images",
                                 4);
    if (8 + static_cast<std::size_t>(ln) > lab.size())
        throw TruncatedError(labels_path + ": declared " + std::to_string(ln) +
                                 " labels, file ends early",
                             lab.size());

    SampleBatch batch;
    batch.x = Tensor2D(n, static_cast<std::size_t>(rows) * cols);
    batch.labels.resize(n);
    const double inv255 = 1.0 / 255.0;
    for (std::size_t i = 0; i < n; ++i) {
        double* r = batch.x.row(i);
        const unsigned char* src = img.data() + 16 + i * rows * cols;
        for (std::size_t j = 0; j < static_cast<std::size_t>(rows) * cols; ++j)
            r[j] = src[j] * inv255;
        batch.labels[i] = lab[8 + i];
    }
    int max_label = 0;
    for (int l : batch.labels) max_label = std::max(max_label, l);
    batch.num_classes = static_cast<std::size_t>(max_label) + 1;
    return batch;
}

void write_idx(const SampleBatch& batch, std::size_t img_rows, std::size_t img_cols,
               const std::string& images_path, const std::string& labels_path) {
    if (img_rows * img_cols != batch.dim())
        throw ArgumentError("write_idx: rows*cols " + std::to_string(img_rows * img_cols) +
                            " vs feature dim " + std::to_string(batch.dim()));
    std::ofstream img(images_path, std::ios::binary | std::ios::trunc);
    if (!img) throw IoError("cannot open " + images_path);
    put_be32(img, 0x00000803u);
    put_be32(img, static_cast<std::uint32_t>(batch.size()));
    put_be32(img, static_cast<std::uint32_t>(img_rows));
    put_be32(img, static_cast<std::uint32_t>(img_cols));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double* r = batch.x.row(i);
        for (std::size_t j = 0; j < batch.dim(); ++j) {
            double v = std::clamp(r[j], 0.0, 1.0);
            img.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
        }
    }
    if (!img) throw IoError("short write to " + images_path);

    std::ofstream lab(labels_path, std::ios::binary | std::ios::trunc);
    if (!lab) throw IoError("cannot open " + labels_path);
    put_be32(lab, 0x00000801u);
    put_be32(lab, static_cast<std::uint32_t>(batch.size()));
    for (int l : batch.labels) lab.put(static_cast<char>(static_cast<unsigned char>(l)));
    if (!lab) throw IoError("short write to " + labels_path);
}

void export_embeddings_csv(const EmbeddingSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path);
    out << "label";
    for (std::size_t j = 0; j < set.dim(); ++j) out << ",e" << j;
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < set.size(); ++i) {
        out << set.labels[i];
        const double* r = set.embeddings.row(i);
        for (std::size_t j = 0; j < set.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g", r[j]);
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("short write to " + path);
}

void export_embeddings_json(const EmbeddingSet& set, const std::string& path) {
    nlohmann::json j;
    j["labels"] = set.labels;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < set.dim(); ++c) row.push_back(set.embeddings(i, c));
        rows.push_back(std::move(row));
    }
    j["embeddings"] = std::move(rows);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("short write to " + path);
}

EmbeddingSet import_embeddings_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": missing header", 0);
    std::size_t cols = std::count(line.begin(), line.end(), ',');
    if (line.rfind("label", 0) != 0)
        throw ParseError(path + ": header must start with 'label'", 0);

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const char* p = line.c_str();
        char* end = nullptr;
        long lab = std::strtol(p, &end, 10);
        if (end == p) throw ParseError(path + ": bad label on line " + std::to_string(line_no), 0);
        labels.push_back(static_cast<int>(lab));
        p = end;
        for (std::size_t j = 0; j < cols; ++j) {
            if (*p != ',')
                throw ParseError(path + ": expected ',' on line " + std::to_string(line_no), 0);
            ++p;
            double v = std::strtod(p, &end);
            if (end == p)
                throw ParseError(path + ": bad value on line " + std::to_string(line_no), 0);
            values.push_back(v);
            p = end;
        }
    }
    EmbeddingSet set;
    set.labels = std::move(labels);
    set.embeddings = Tensor2D(set.labels.size(), cols);
    if (!values.empty())
        std::memcpy(set.embeddings.data(), values.data(), values.size() * sizeof(double));
    return set;
}

}  // namespace heatup
