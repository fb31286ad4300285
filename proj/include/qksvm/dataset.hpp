#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qksvm/errors.hpp"
#include "qksvm/feature_map.hpp"
#include "qksvm/rng.hpp"

#include <json.hpp>

namespace qksvm {

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Dataset {
    std::vector<DataPoint> points;
    std::vector<std::string> feature_names;
    std::size_t n_dropped = 0; // rows skipped because a cell had no encoding
};

// --- csv ----------------------------------------------------------------------

/// RFC 4180 parser: quoted fields may contain commas, newlines and doubled
/// quotes. Accepts both LF and CRLF line endings. The first record is the
/// header; every data row must match its width.
inline RawTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;

    auto end_field = [&]() {
        record.push_back(field);
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || field_was_quoted) {
                throw DataError("csv: stray quote in record " +
                                std::to_string(records.size() + 1));
            }
            in_quotes = true;
            field_was_quoted = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') {
                ++i;
            }
            end_record();
            break;
        case '\n':
            end_record();
            break;
        default:
            field.push_back(c);
        }
    }
    if (in_quotes) {
        throw DataError("csv: unterminated quoted field");
    }
    if (!field.empty() || field_was_quoted || !record.empty()) {
        end_record();
    }
    if (records.empty()) {
        throw DataError("csv: input has no header row");
    }

    RawTable table;
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() == 1 && records[r][0].empty()) {
            continue; // blank line
        }
        if (records[r].size() != table.header.size()) {
            throw DataError("csv: data row " + std::to_string(r) + " has " +
                            std::to_string(records[r].size()) + " fields, expected " +
                            std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

inline RawTable load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open csv file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

// --- encoding -----------------------------------------------------------------

/// Per-column encoding. Ordinal columns map category strings to numbers;
/// one-hot columns expand to one 0/1 feature per listed category. A cell
/// missing from its mapping drops the whole row (counted, not fatal).
struct ColumnEncoding {
    enum class Kind { Ordinal, OneHot };
    std::string column;
    Kind kind = Kind::Ordinal;
    std::map<std::string, double> mapping;   // ordinal
    std::vector<std::string> categories;     // one-hot, order fixes feature order
};

struct EncodingSpec {
    std::string label_column;
    std::map<std::string, int> label_map; // category -> +1 / -1
    std::vector<ColumnEncoding> features;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])) != 0) {
        ++a;
    }
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])) != 0) {
        --b;
    }
    return s.substr(a, b - a);
}

inline std::size_t column_index(const RawTable& table, const std::string& name) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (trim(table.header[c]) == name) {
            return c;
        }
    }
    throw DataError("csv is missing required column: " + name);
}

} // namespace detail

/// Applies the encoding spec, silently dropping rows whose label or feature
/// cells have no mapping (the count is reported on the result).
inline Dataset encode_dataset(const RawTable& table, const EncodingSpec& spec) {
    if (spec.features.empty()) {
        throw ConfigError("encoding spec lists no feature columns");
    }
    const std::size_t label_col = detail::column_index(table, spec.label_column);
    std::vector<std::size_t> feature_cols;
    for (const auto& enc : spec.features) {
        feature_cols.push_back(detail::column_index(table, enc.column));
    }

    Dataset ds;
    for (const auto& enc : spec.features) {
        if (enc.kind == ColumnEncoding::Kind::Ordinal) {
            if (enc.mapping.empty()) {
                throw ConfigError("ordinal encoding for '" + enc.column + "' has no mapping");
            }
            ds.feature_names.push_back(enc.column);
        } else {
            if (enc.categories.empty()) {
                throw ConfigError("one-hot encoding for '" + enc.column + "' has no categories");
            }
            for (const auto& cat : enc.categories) {
                ds.feature_names.push_back(enc.column + "=" + cat);
            }
        }
    }

    for (const auto& row : table.rows) {
        DataPoint point;
        const auto label_it = spec.label_map.find(detail::trim(row[label_col]));
        if (label_it == spec.label_map.end()) {
            ++ds.n_dropped;
            continue;
        }
        point.label = label_it->second;
        bool ok = true;
        for (std::size_t f = 0; f < spec.features.size() && ok; ++f) {
            const std::string cell = detail::trim(row[feature_cols[f]]);
            const ColumnEncoding& enc = spec.features[f];
            if (enc.kind == ColumnEncoding::Kind::Ordinal) {
                const auto it = enc.mapping.find(cell);
                if (it == enc.mapping.end()) {
                    ok = false;
                } else {
                    point.features.push_back(it->second);
                }
            } else {
                bool matched = false;
                for (const auto& cat : enc.categories) {
                    point.features.push_back(cell == cat ? 1.0 : 0.0);
                    matched = matched || cell == cat;
                }
                ok = matched;
            }
        }
        if (!ok) {
            ++ds.n_dropped;
            continue;
        }
        ds.points.push_back(std::move(point));
    }
    return ds;
}

inline EncodingSpec encoding_spec_from_json(const nlohmann::json& j) {
    EncodingSpec spec;
    spec.label_column = j.at("label_column").get<std::string>();
    for (const auto& [key, value] : j.at("label_map").items()) {
        const int mapped = value.get<int>();
        if (mapped != 1 && mapped != -1) {
            throw ConfigError("label_map values must be +1 or -1");
        }
        spec.label_map[key] = mapped;
    }
    for (const auto& f : j.at("features")) {
        ColumnEncoding enc;
        enc.column = f.at("column").get<std::string>();
        const std::string kind = f.value("kind", std::string("ordinal"));
        if (kind == "ordinal") {
            enc.kind = ColumnEncoding::Kind::Ordinal;
            for (const auto& [key, value] : f.at("mapping").items()) {
                enc.mapping[key] = value.get<double>();
            }
        } else if (kind == "one_hot") {
            enc.kind = ColumnEncoding::Kind::OneHot;
            enc.categories = f.at("categories").get<std::vector<std::string>>();
        } else {
            throw ConfigError("unknown column encoding kind: " + kind);
        }
        spec.features.push_back(std::move(enc));
    }
    return spec;
}

inline nlohmann::json to_json(const EncodingSpec& spec) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto& enc : spec.features) {
        nlohmann::json f{{"column", enc.column}};
        if (enc.kind == ColumnEncoding::Kind::Ordinal) {
            f["kind"] = "ordinal";
            f["mapping"] = enc.mapping;
        } else {
            f["kind"] = "one_hot";
            f["categories"] = enc.categories;
        }
        features.push_back(std::move(f));
    }
    return {{"label_column", spec.label_column},
            {"label_map", spec.label_map},
            {"features", features}};
}

// --- sampling and splitting ---------------------------------------------------

namespace detail {

/// Largest-remainder allocation of `total` slots over class sizes, keyed by
/// ascending label for determinism.
inline std::map<int, std::size_t> allocate_by_class(const std::map<int, std::size_t>& sizes,
                                                    std::size_t total_in, std::size_t want) {
    std::map<int, std::size_t> quota;
    std::vector<std::pair<double, int>> remainders; // (-fraction, label)
    std::size_t assigned = 0;
    for (const auto& [label, size] : sizes) {
        const double exact =
            static_cast<double>(want) * static_cast<double>(size) / static_cast<double>(total_in);
        const auto base = static_cast<std::size_t>(std::floor(exact));
        quota[label] = base;
        assigned += base;
        remainders.emplace_back(-(exact - std::floor(exact)), label);
    }
    std::stable_sort(remainders.begin(), remainders.end());
    for (std::size_t k = 0; assigned < want; k = (k + 1) % remainders.size()) {
        const int label = remainders[k].second;
        if (quota[label] < sizes.at(label)) {
            ++quota[label];
            ++assigned;
        }
    }
    return quota;
}

inline void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
    }
}

} // namespace detail

/// Draws a class-balanced subset of size n (proportional largest-remainder
/// allocation), preserving the original row order of the survivors.
inline std::vector<DataPoint> subsample_stratified(const std::vector<DataPoint>& points,
                                                   std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw UsageError("subsample size must be positive");
    }
    if (n >= points.size()) {
        return points;
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < points.size(); ++i) {
        by_class[points[i].label].push_back(i);
    }
    std::map<int, std::size_t> sizes;
    for (const auto& [label, idx] : by_class) {
        sizes[label] = idx.size();
    }
    const auto quota = detail::allocate_by_class(sizes, points.size(), n);

    std::vector<std::size_t> chosen;
    std::uint64_t class_ordinal = 0;
    for (auto& [label, idx] : by_class) {
        Rng rng(derive_seed(seed, 0x535542, class_ordinal++)); // "SUB" stream
        detail::shuffle_indices(idx, rng);
        for (std::size_t k = 0; k < quota.at(label); ++k) {
            chosen.push_back(idx[k]);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<DataPoint> out;
    out.reserve(chosen.size());
    for (std::size_t i : chosen) {
        out.push_back(points[i]);
    }
    return out;
}

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified train/test split. The per-class train quota uses
/// largest-remainder rounding toward round(train_fraction * n). A draw is
/// valid when both sides are nonempty and the training side holds both
/// classes; otherwise it is redrawn with a derived seed (at most 100
/// attempts before giving up).
inline SplitIndices split_stratified(const std::vector<DataPoint>& points, double train_fraction,
                                     std::uint64_t seed) {
    if (points.size() < 2) {
        throw DataError("split requires at least 2 points");
    }
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw UsageError("train_fraction must lie strictly between 0 and 1");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < points.size(); ++i) {
        by_class[points[i].label].push_back(i);
    }
    std::map<int, std::size_t> sizes;
    for (const auto& [label, idx] : by_class) {
        sizes[label] = idx.size();
    }
    const auto want =
        static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(points.size())));
    const auto quota = detail::allocate_by_class(sizes, points.size(), want);

    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        SplitIndices split;
        std::map<int, std::size_t> train_per_class;
        std::uint64_t class_ordinal = 0;
        for (const auto& [label, original] : by_class) {
            std::vector<std::size_t> idx = original;
            Rng rng(derive_seed(seed, attempt, 0x53504c54 + class_ordinal++)); // "SPLT"
            detail::shuffle_indices(idx, rng);
            for (std::size_t k = 0; k < idx.size(); ++k) {
                if (k < quota.at(label)) {
                    split.train.push_back(idx[k]);
                    ++train_per_class[label];
                } else {
                    split.test.push_back(idx[k]);
                }
            }
        }
        bool valid = !split.train.empty() && !split.test.empty();
        for (const auto& [label, size] : sizes) {
            (void)size;
            valid = valid && train_per_class[label] > 0;
        }
        if (valid) {
            std::sort(split.train.begin(), split.train.end());
            std::sort(split.test.begin(), split.test.end());
            return split;
        }
    }
    throw DataError("could not produce a split with both classes in the training side");
}

// --- feature scaling ----------------------------------------------------------

/// Column-wise z-score (sample standard deviation); constant columns become 0.
inline std::vector<std::vector<double>> standardize(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) {
        throw DataError("standardize requires at least two rows");
    }
    const std::size_t d = rows[0].size();
    std::vector<double> mean(d, 0.0);
    for (const auto& row : rows) {
        if (row.size() != d) {
            throw DataError("standardize rows must have equal width");
        }
        for (std::size_t c = 0; c < d; ++c) {
            mean[c] += row[c];
        }
    }
    for (double& m : mean) {
        m /= static_cast<double>(rows.size());
    }
    std::vector<double> sd(d, 0.0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < d; ++c) {
            const double delta = row[c] - mean[c];
            sd[c] += delta * delta;
        }
    }
    for (double& s : sd) {
        s = std::sqrt(s / static_cast<double>(rows.size() - 1));
    }
    std::vector<std::vector<double>> out = rows;
    for (auto& row : out) {
        for (std::size_t c = 0; c < d; ++c) {
            row[c] = sd[c] > 0.0 ? (row[c] - mean[c]) / sd[c] : 0.0;
        }
    }
    return out;
}

/// Min-max fit. Applying maps [min, max] onto [lo, lo + (hi-lo)*(1-1e-9)];
/// the slack keeps angle-encoded features strictly below the upper bound.
/// Values outside the fitted range (test data) extrapolate unclipped;
/// constant columns map to the interval midpoint.
struct ScaleRecord {
    std::vector<double> mins;
    std::vector<double> maxs;
    double lo = 0.0;
    double hi = 1.0;
};

inline ScaleRecord fit_scale(const std::vector<std::vector<double>>& rows, double lo, double hi) {
    if (rows.empty()) {
        throw DataError("fit_scale requires at least one row");
    }
    if (!(hi > lo)) {
        throw UsageError("fit_scale requires hi > lo");
    }
    const std::size_t d = rows[0].size();
    ScaleRecord rec;
    rec.lo = lo;
    rec.hi = hi;
    rec.mins.assign(d, std::numeric_limits<double>::infinity());
    rec.maxs.assign(d, -std::numeric_limits<double>::infinity());
    for (const auto& row : rows) {
        if (row.size() != d) {
            throw DataError("fit_scale rows must have equal width");
        }
        for (std::size_t c = 0; c < d; ++c) {
            rec.mins[c] = std::min(rec.mins[c], row[c]);
            rec.maxs[c] = std::max(rec.maxs[c], row[c]);
        }
    }
    return rec;
}

inline std::vector<std::vector<double>> apply_scale(const ScaleRecord& rec,
                                                    const std::vector<std::vector<double>>& rows) {
    const double hi_eff = rec.lo + (rec.hi - rec.lo) * (1.0 - 1e-9);
    std::vector<std::vector<double>> out = rows;
    for (auto& row : out) {
        if (row.size() != rec.mins.size()) {
            throw UsageError("row width does not match fitted scale record");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double span = rec.maxs[c] - rec.mins[c];
            if (span <= 0.0) {
                row[c] = 0.5 * (rec.lo + hi_eff);
                continue;
            }
            row[c] = rec.lo + (row[c] - rec.mins[c]) / span * (hi_eff - rec.lo);
        }
    }
    return out;
}

} // namespace qksvm
