#pragma once

// Versioned binary checkpoints.
//
// Layout (little-endian):
//   magic "ST5CKPT\0", u32 version
//   config: u64 vocab_size d_model n_heads d_ff n_enc n_dec max_seq_len
//           d_sensory_hidden n_classes adapter_heads, f64 dropout_keep,
//           u8 max_pool, u8 decoder_len1
//   u8 mode, u64 seed
//   labels: u64 count, then (u64 length, bytes) each
//   vocabulary: same encoding as labels
//   tensors: u64 count, then per tensor
//            (u64 length, name bytes), u64 rank, u64 extents..., f64 values...
// Values are always stored as f64; a 32-bit model converts on load.

#include <bit>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sensoryt5/dataset.hpp"
#include "sensoryt5/io.hpp"
#include "sensoryt5/model.hpp"

namespace sensoryt5 {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

inline constexpr char kCheckpointMagic[8] = {'S', 'T', '5', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <std::floating_point T>
struct Checkpoint {
    SensoryT5<T> model;
    AblationMode mode = AblationMode::sensory;
    std::uint64_t seed = 0;
    std::vector<std::string> labels;
    Vocabulary vocab;
};

namespace detail {

class ByteWriter {
public:
    template <typename V>
    void pod(V v) {
        const auto* p = reinterpret_cast<const char*>(&v);
        buf_.append(p, sizeof v);
    }
    void u64(std::uint64_t v) { pod(v); }
    void str(std::string_view s) {
        u64(s.size());
        buf_.append(s);
    }
    void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
    const std::string& bytes() const { return buf_; }

private:
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    template <typename V>
    V pod(const char* what) {
        need(sizeof(V), what);
        V v;
        std::memcpy(&v, data_.data() + pos_, sizeof v);
        pos_ += sizeof v;
        return v;
    }
    std::uint64_t u64(const char* what) { return pod<std::uint64_t>(what); }
    std::string str(const char* what) {
        const auto n = u64(what);
        need(n, what);
        std::string s(data_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    void raw(void* dst, std::size_t n, const char* what) {
        need(n, what);
        std::memcpy(dst, data_.data() + pos_, n);
        pos_ += n;
    }
    bool at_end() const { return pos_ == data_.size(); }

private:
    void need(std::uint64_t n, const char* what) {
        if (n > data_.size() - pos_) throw Error(std::string("checkpoint truncated while reading ") + what);
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

}  // namespace detail

template <std::floating_point T>
std::string serialize_checkpoint(const Checkpoint<T>& ck) {
    detail::ByteWriter w;
    w.raw(kCheckpointMagic, sizeof kCheckpointMagic);
    w.pod(kCheckpointVersion);
    const auto& c = ck.model.config();
    for (std::size_t v : {c.vocab_size, c.d_model, c.n_heads, c.d_ff, c.n_enc_layers, c.n_dec_layers, c.max_seq_len,
                          c.d_sensory_hidden, c.n_classes, c.adapter_heads})
        w.u64(v);
    w.pod(c.dropout_keep);
    w.pod(static_cast<std::uint8_t>(c.max_pool));
    w.pod(static_cast<std::uint8_t>(c.decoder_len1));
    w.pod(static_cast<std::uint8_t>(ck.mode));
    w.u64(ck.seed);
    w.u64(ck.labels.size());
    for (const auto& l : ck.labels) w.str(l);
    w.u64(ck.vocab.size());
    for (const auto& t : ck.vocab.tokens()) w.str(t);
    w.u64(ck.model.params().size());
    for (const auto& p : ck.model.params()) {
        w.str(p.name);
        w.u64(p.value.rank());
        for (auto e : p.value.shape()) w.u64(e);
        for (T v : p.value.data()) w.pod(static_cast<double>(v));
    }
    return w.bytes();
}

template <std::floating_point T>
void save_checkpoint(const std::filesystem::path& path, const Checkpoint<T>& ck) {
    write_file_atomic(path, serialize_checkpoint(ck));
}

namespace detail {

struct RawTensor {
    std::string name;
    Shape shape;
    std::vector<double> values;
};

// Copies stored tensors into `store` after checking that names and shapes
// match exactly; nothing is modified unless every tensor validates.
template <std::floating_point T>
void assign_tensors(ParamStore<T>& store, const std::vector<RawTensor>& tensors) {
    std::unordered_map<std::string, const RawTensor*> by_name;
    for (const auto& t : tensors) by_name.emplace(t.name, &t);
    for (const auto& p : store) {
        auto it = by_name.find(p.name);
        if (it == by_name.end()) throw Error("checkpoint is missing tensor '" + p.name + "'");
        if (it->second->shape != p.value.shape()) {
            throw ShapeError("checkpoint tensor '" + p.name + "' has shape " + shape_string(it->second->shape) +
                             ", model expects " + shape_string(p.value.shape()));
        }
    }
    if (tensors.size() != store.size()) throw Error("checkpoint has tensors the model does not define");
    for (auto& p : store) {
        const auto& src = by_name.at(p.name)->values;
        for (std::size_t i = 0; i < src.size(); ++i) p.value[i] = static_cast<T>(src[i]);
    }
}

struct RawCheckpoint {
    ModelConfig config;
    std::uint8_t mode = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> labels;
    std::vector<std::string> vocab;
    std::vector<RawTensor> tensors;
};

inline RawCheckpoint read_raw_checkpoint(std::string_view bytes) {
    ByteReader r(bytes);
    char magic[8];
    r.raw(magic, sizeof magic, "magic");
    if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) throw Error("not a checkpoint file (bad magic)");
    const auto version = r.pod<std::uint32_t>("version");
    if (version != kCheckpointVersion) {
        throw Error("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                    std::to_string(kCheckpointVersion) + ")");
    }
    RawCheckpoint raw;
    ModelConfig& c = raw.config;
    for (std::size_t* f : {&c.vocab_size, &c.d_model, &c.n_heads, &c.d_ff, &c.n_enc_layers, &c.n_dec_layers,
                           &c.max_seq_len, &c.d_sensory_hidden, &c.n_classes, &c.adapter_heads})
        *f = static_cast<std::size_t>(r.u64("config"));
    c.dropout_keep = r.pod<double>("config");
    c.max_pool = r.pod<std::uint8_t>("config") != 0;
    c.decoder_len1 = r.pod<std::uint8_t>("config") != 0;
    raw.mode = r.pod<std::uint8_t>("mode");
    if (raw.mode > 2) throw Error("checkpoint has unknown mode " + std::to_string(raw.mode));
    raw.seed = r.u64("seed");
    for (auto* list : {&raw.labels, &raw.vocab}) {
        const auto n = r.u64("string table");
        if (n > bytes.size()) throw Error("checkpoint truncated while reading string table");
        list->resize(n);
        for (auto& s : *list) s = r.str("string table");
    }
    const auto n_tensors = r.u64("tensor count");
    if (n_tensors > bytes.size()) throw Error("checkpoint truncated while reading tensors");
    raw.tensors.resize(n_tensors);
    for (auto& t : raw.tensors) {
        t.name = r.str("tensor name");
        const auto rank = r.u64("tensor rank");
        if (rank > 8) throw Error("checkpoint tensor '" + t.name + "' has implausible rank");
        for (std::uint64_t i = 0; i < rank; ++i) t.shape.push_back(static_cast<std::size_t>(r.u64("tensor shape")));
        const std::size_t n = shape_numel(t.shape);
        if (n > bytes.size() / sizeof(double)) throw Error("checkpoint truncated while reading tensor '" + t.name + "'");
        t.values.resize(n);
        r.raw(t.values.data(), n * sizeof(double), "tensor values");
    }
    if (!r.at_end()) throw Error("checkpoint has trailing bytes");
    return raw;
}

}  // namespace detail

template <std::floating_point T>
Checkpoint<T> parse_checkpoint(std::string_view bytes) {
    auto raw = detail::read_raw_checkpoint(bytes);
    raw.config.validate();
    if (raw.labels.size() != raw.config.n_classes) throw Error("checkpoint label count does not match n_classes");
    if (raw.vocab.size() != raw.config.vocab_size) throw Error("checkpoint vocabulary size does not match vocab_size");
    Vocabulary vocab;
    for (std::size_t i = 0; i < raw.vocab.size(); ++i)
        if (vocab.add(raw.vocab[i]) != i) throw Error("checkpoint vocabulary is not consistent");

    Checkpoint<T> ck{SensoryT5<T>(raw.config, 0), static_cast<AblationMode>(raw.mode), raw.seed,
                     std::move(raw.labels), std::move(vocab)};
    detail::assign_tensors(ck.model.params(), raw.tensors);
    return ck;
}

template <std::floating_point T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path) {
    return parse_checkpoint<T>(read_file(path));
}

/// Loads only the tensors of a checkpoint into an existing model. Every
/// tensor's name and shape is validated before any value is written.
template <std::floating_point T>
void load_checkpoint_into(SensoryT5<T>& model, const std::filesystem::path& path) {
    const auto raw = detail::read_raw_checkpoint(read_file(path));
    detail::assign_tensors(model.params(), raw.tensors);
}

}  // namespace sensoryt5
