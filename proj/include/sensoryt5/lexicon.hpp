#pragma once

// Sensorimotor lexicons: parsing, normalization, lookup, merging, and the
// analytics run over them (value histograms, corpus coverage).

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sensoryt5/error.hpp"

namespace sensoryt5 {

inline constexpr std::size_t kSensoryDims = 6;
inline constexpr double kSensoryMin = 0.0;
inline constexpr double kSensoryMax = 5.0;
inline constexpr std::array<std::string_view, kSensoryDims> kSensoryNames = {
    "auditory", "gustatory", "haptic", "interoceptive", "olfactory", "visual"};

/// Perceptual strength ratings in the fixed order of kSensoryNames, each in [0, 5].
struct SensoryVector {
    std::array<double, kSensoryDims> values{};

    static bool valid(double v) { return std::isfinite(v) && v >= kSensoryMin && v <= kSensoryMax; }

    bool valid() const {
        for (double v : values)
            if (!valid(v)) return false;
        return true;
    }

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    friend bool operator==(const SensoryVector&, const SensoryVector&) = default;
};

enum class EntrySource { original, predicted };

inline std::string_view source_tag(EntrySource s) {
    return s == EntrySource::original ? "orig" : "pred";
}

// Bytes >= 0x80 count as word characters so UTF-8 sequences are never split.
inline bool is_word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

/// Lowercases ASCII letters and strips leading/trailing non-alphanumerics.
inline std::string normalize_word(std::string_view w) {
    std::size_t b = 0, e = w.size();
    while (b < e && !is_word_byte(static_cast<unsigned char>(w[b]))) ++b;
    while (e > b && !is_word_byte(static_cast<unsigned char>(w[e - 1]))) --e;
    std::string out(w.substr(b, e - b));
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

struct LexiconEntry {
    std::string word;
    SensoryVector vector;
    EntrySource source = EntrySource::original;
};

/// word -> (SensoryVector, provenance). Insertion order is preserved so
/// iteration, serialization and seeded splits are reproducible.
class Lexicon {
public:
    Lexicon() = default;

    /// Inserts unless the normalized word is already present. Returns false on
    /// collision (first occurrence wins). Throws on an invalid vector or an
    /// empty normalized word.
    bool insert(std::string_view word, const SensoryVector& v, EntrySource source = EntrySource::original) {
        std::string key = normalize_word(word);
        if (key.empty()) throw Error("lexicon word '" + std::string(word) + "' is empty after normalization");
        if (!v.valid()) throw Error("sensory values for '" + key + "' outside [0, 5]");
        if (index_.contains(key)) return false;
        index_.emplace(key, entries_.size());
        entries_.push_back({std::move(key), v, source});
        return true;
    }

    const LexiconEntry* find(std::string_view word) const {
        const std::string key = normalize_word(word);
        if (key.empty()) return nullptr;
        auto it = index_.find(key);
        return it == index_.end() ? nullptr : &entries_[it->second];
    }

    std::optional<SensoryVector> lookup(std::string_view word) const {
        if (const auto* e = find(word)) return e->vector;
        return std::nullopt;
    }

    bool contains(std::string_view word) const { return find(word) != nullptr; }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    std::size_t count(EntrySource s) const {
        std::size_t n = 0;
        for (const auto& e : entries_) n += e.source == s;
        return n;
    }

    /// Rows skipped during parsing because their word was already present.
    std::size_t duplicate_rows() const noexcept { return duplicates_; }
    void note_duplicate() noexcept { ++duplicates_; }

    friend bool operator==(const Lexicon& a, const Lexicon& b) {
        if (a.entries_.size() != b.entries_.size()) return false;
        for (std::size_t i = 0; i < a.entries_.size(); ++i) {
            const auto& x = a.entries_[i];
            const auto& y = b.entries_[i];
            if (x.word != y.word || x.vector != y.vector || x.source != y.source) return false;
        }
        return true;
    }

private:
    std::vector<LexiconEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t duplicates_ = 0;
};

// ---------------------------------------------------------------------------
// Parsing / serialization

struct LexiconFormat {
    char delimiter = '\t';
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Column layout resolved from the (optional) header.
struct LexiconColumns {
    std::size_t width = 7;
    std::size_t word = 0;
    std::array<std::size_t, kSensoryDims> dims{1, 2, 3, 4, 5, 6};
    std::optional<std::size_t> source;
};

// A wide header (e.g. the full norms release with Auditory.mean, ...) is mapped
// by name; the first column whose name starts with a dimension name is used.
inline LexiconColumns columns_from_header(const std::vector<std::string_view>& header, std::size_t line) {
    LexiconColumns cols;
    cols.width = header.size();
    if (header.size() == 7) return cols;
    if (header.size() == 8 && lower(trim(header[7])) == "source") {
        cols.source = 7;
        return cols;
    }
    bool found_word = false;
    std::array<bool, kSensoryDims> found{};
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = lower(trim(header[c]));
        if (!found_word && name == "word") {
            cols.word = c;
            found_word = true;
            continue;
        }
        for (std::size_t d = 0; d < kSensoryDims; ++d) {
            if (!found[d] && name.starts_with(kSensoryNames[d])) {
                cols.dims[d] = c;
                found[d] = true;
            }
        }
    }
    for (std::size_t d = 0; d < kSensoryDims; ++d) {
        if (!found[d]) {
            throw ParseError("header has no column for dimension '" + std::string(kSensoryNames[d]) + "'", line);
        }
    }
    if (!found_word) cols.word = 0;
    return cols;
}

}  // namespace detail

/// Reads `word<delim>v1..v6[<delim>source]` rows. A header is recognized when
/// the second field of the first non-empty row is not numeric. Duplicate words
/// keep the first occurrence and are counted in duplicate_rows().
inline Lexicon parse_lexicon(std::istream& in, const LexiconFormat& fmt = {}) {
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    std::optional<detail::LexiconColumns> cols;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_fields(line, fmt.delimiter);
        if (!cols) {
            if (fields.size() >= 2 && !detail::parse_double(fields[1])) {
                cols = detail::columns_from_header(fields, line_no);
                continue;
            }
            cols = detail::LexiconColumns{};
            if (fields.size() == 8) {
                cols->width = 8;
                cols->source = 7;
            }
        }
        if (fields.size() != cols->width) {
            throw ParseError("expected " + std::to_string(cols->width) + " columns, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        SensoryVector v;
        for (std::size_t d = 0; d < kSensoryDims; ++d) {
            const auto value = detail::parse_double(fields[cols->dims[d]]);
            if (!value) {
                throw ParseError("non-numeric " + std::string(kSensoryNames[d]) + " value '" +
                                     std::string(fields[cols->dims[d]]) + "'",
                                 line_no);
            }
            if (!SensoryVector::valid(*value)) {
                throw ParseError(std::string(kSensoryNames[d]) + " value " + std::string(detail::trim(fields[cols->dims[d]])) +
                                     " outside [0, 5]",
                                 line_no);
            }
            v[d] = *value;
        }
        EntrySource source = EntrySource::original;
        if (cols->source) {
            const auto tag = detail::trim(fields[*cols->source]);
            if (tag == "orig") source = EntrySource::original;
            else if (tag == "pred") source = EntrySource::predicted;
            else throw ParseError("unknown source tag '" + std::string(tag) + "'", line_no);
        }
        const auto word = detail::trim(fields[cols->word]);
        if (normalize_word(word).empty()) throw ParseError("empty word", line_no);
        if (!lex.insert(word, v, source)) lex.note_duplicate();
    }
    return lex;
}

inline Lexicon parse_lexicon(std::string_view text, const LexiconFormat& fmt = {}) {
    std::istringstream in{std::string(text)};
    return parse_lexicon(in, fmt);
}

/// Writes a header plus one row per entry with a trailing source column.
/// Values use 17 significant digits so parsing recovers them exactly.
inline void write_lexicon(std::ostream& out, const Lexicon& lex, const LexiconFormat& fmt = {}) {
    out << "word";
    for (auto name : kSensoryNames) out << fmt.delimiter << name;
    out << fmt.delimiter << "source\n";
    char buf[32];
    for (const auto& e : lex) {
        out << e.word;
        for (double v : e.vector.values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << fmt.delimiter << buf;
        }
        out << fmt.delimiter << source_tag(e.source) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Analytics

/// Base entries win on collision, so original norms are never overwritten.
inline Lexicon merge(const Lexicon& base, const Lexicon& additions) {
    Lexicon out = base;
    for (const auto& e : additions) out.insert(e.word, e.vector, e.source);
    return out;
}

struct Histogram {
    std::size_t dimension = 0;
    std::vector<double> bin_edges;  // n_bins + 1 edges spanning [0, 5]
    std::vector<std::size_t> counts;
};

/// Uniform bins over [0, 5]; a value of exactly 5 lands in the last bin.
inline Histogram histogram(const Lexicon& lex, std::size_t dimension, std::size_t n_bins) {
    if (dimension >= kSensoryDims) {
        throw Error("histogram dimension " + std::to_string(dimension) + " out of range 0..5");
    }
    if (n_bins == 0) throw Error("histogram needs at least one bin");
    Histogram h;
    h.dimension = dimension;
    h.counts.assign(n_bins, 0);
    const double width = (kSensoryMax - kSensoryMin) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) {
        h.bin_edges.push_back(i == n_bins ? kSensoryMax : kSensoryMin + width * static_cast<double>(i));
    }
    for (const auto& e : lex) {
        const double v = e.vector[dimension];
        auto bin = static_cast<std::size_t>((v - kSensoryMin) / width);
        if (bin >= n_bins) bin = n_bins - 1;
        // Guard against round-off placing an edge value one bin too high.
        while (bin > 0 && v < h.bin_edges[bin]) --bin;
        ++h.counts[bin];
    }
    return h;
}

using Document = std::vector<std::string>;

struct CoverageReport {
    std::size_t total_tokens = 0;
    std::size_t covered_tokens = 0;
    double coverage_pct = 0.0;
    std::vector<std::pair<std::size_t, double>> per_document;
};

inline double percent(std::size_t covered, std::size_t total) {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(covered) / static_cast<double>(total);
}

/// Token-level coverage by default. With `types` set, the corpus totals count
/// each distinct normalized token once (per-document figures stay token-level).
inline CoverageReport coverage(const Lexicon& lex, const std::vector<Document>& corpus, bool types = false) {
    CoverageReport r;
    std::unordered_set<std::string> seen;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        std::size_t doc_total = 0, doc_covered = 0;
        for (const auto& tok : corpus[d]) {
            const bool hit = lex.contains(tok);
            ++doc_total;
            doc_covered += hit;
            if (types) {
                if (!seen.insert(normalize_word(tok)).second) continue;
            }
            ++r.total_tokens;
            r.covered_tokens += hit;
        }
        r.per_document.emplace_back(d, percent(doc_covered, doc_total));
    }
    r.coverage_pct = percent(r.covered_tokens, r.total_tokens);
    return r;
}

}  // namespace sensoryt5
