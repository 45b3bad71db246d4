#pragma once

/**
 * \file   mjsr/io.hpp
 * \brief  Instance files (JSON) and report helpers.
 *
 * Instance file layout:
 *
 *   {
 *     "dimension": d,
 *     "field": "real" | "complex",
 *     "matrices": [ M_1, ..., M_N ],     // each d rows of d entries, or d*d entries flat
 *     "omega": [[0/1, ...], ...],        // N x N; or instead:
 *     "kstep": { "k": k, "allowed": [[i_1, ..., i_{k+1}], ...] }
 *   }
 *
 * Complex entries are [re, im] pairs, letters are 1-based. Lift files add a
 * "lift" object describing the block layout and the 0/1 factors.
 */

#include <mjsr/kstep.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mjsr::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Malformed document: not JSON, wrong types, missing keys.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct KStepSpec {
    std::size_t k = 0;
    std::vector<Tuple> allowed; ///< 0-based
    friend bool operator==(const KStepSpec&, const KStepSpec&) = default;
};

/// Block layout of a lifted instance.
struct LiftMeta {
    std::size_t blocks = 0;
    std::size_t block_dim = 0;
    std::vector<IntMatrix> factors;
    std::optional<TransitionMatrix> source_omega;
    friend bool operator==(const LiftMeta&, const LiftMeta&) = default;
};

struct InstanceFile {
    std::size_t dimension = 0;
    FieldTag field = FieldTag::Real;
    std::vector<ComplexMatrix> matrices;
    std::optional<TransitionMatrix> omega;
    std::optional<KStepSpec> kstep;
    std::optional<LiftMeta> lift;

    friend bool operator==(const InstanceFile&, const InstanceFile&) = default;

    MatrixSet<double> real_set() const {
        std::vector<RealMatrix> out;
        for (const auto& m : matrices) {
            std::vector<double> e;
            for (const auto& x : m.entries()) e.push_back(x.real());
            out.emplace_back(m.rows(), m.cols(), std::move(e));
        }
        return MatrixSet<double>(std::move(out));
    }

    MatrixSet<Complex> complex_set() const { return MatrixSet<Complex>(matrices); }

    KStepConstraint constraint() const {
        if (!kstep) throw ValidationError(ErrorKind::EmptyConstraint, "kstep", "instance has no kstep block");
        return KStepConstraint(matrices.size(), kstep->k, kstep->allowed);
    }
};

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

inline std::size_t positive_int(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<std::int64_t>() <= 0) fail(where, "expected a positive integer");
    return j.get<std::size_t>();
}

inline Complex parse_entry(const json& j, FieldTag field, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (field == FieldTag::Complex && j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    fail(where, field == FieldTag::Complex ? "expected a number or an [re, im] pair" : "expected a number");
}

inline bool is_entry(const json& j, FieldTag field) {
    return j.is_number() || (field == FieldTag::Complex && j.is_array() && j.size() == 2 && j[0].is_number());
}

inline ComplexMatrix parse_matrix(const json& j, std::size_t d, FieldTag field, std::size_t index) {
    const std::string where = "matrices[" + std::to_string(index + 1) + "]";
    if (!j.is_array() || j.empty()) fail(where, "expected an array");
    std::vector<Complex> entries;
    std::size_t rows = 0, cols = 0;
    if (is_entry(j[0], field)) { // flat, row-major
        if (j.size() != d * d)
            throw ValidationError(ErrorKind::NonSquare, where,
                                  std::to_string(j.size()) + " entries for dimension " + std::to_string(d));
        for (std::size_t k = 0; k < j.size(); ++k)
            entries.push_back(parse_entry(j[k], field, where + "[" + std::to_string(k + 1) + "]"));
        rows = cols = d;
    } else {
        rows = j.size();
        for (std::size_t r = 0; r < rows; ++r) {
            const auto& row = j[r];
            const std::string rw = where + "[" + std::to_string(r + 1) + "]";
            if (!row.is_array()) fail(rw, "expected a row array");
            if (r == 0) cols = row.size();
            else if (row.size() != cols) throw ValidationError(ErrorKind::DimensionMismatch, rw, "ragged rows");
            for (std::size_t c = 0; c < row.size(); ++c)
                entries.push_back(parse_entry(row[c], field, rw + "[" + std::to_string(c + 1) + "]"));
        }
        if (rows != cols) throw ValidationError(ErrorKind::NonSquare, where);
        if (rows != d)
            throw ValidationError(ErrorKind::DimensionMismatch, where,
                                  "matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                                      ", dimension is " + std::to_string(d));
    }
    for (std::size_t k = 0; k < entries.size(); ++k)
        if (!is_finite(entries[k]))
            throw ValidationError(ErrorKind::NonFinite, where + "[" + std::to_string(k / cols + 1) + "," +
                                                            std::to_string(k % cols + 1) + "]");
    return ComplexMatrix(rows, cols, std::move(entries));
}

inline std::vector<int> parse_binary_square(const json& j, const std::string& where, std::size_t& n) {
    if (!j.is_array() || j.empty()) fail(where, "expected a square array of arrays");
    n = j.size();
    std::vector<int> entries;
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = j[r];
        if (!row.is_array()) fail(where + "[" + std::to_string(r + 1) + "]", "expected a row array");
        if (row.size() != n)
            throw ValidationError(ErrorKind::DimensionMismatch, where + "[" + std::to_string(r + 1) + "]",
                                  "row has " + std::to_string(row.size()) + " entries, expected " +
                                      std::to_string(n));
        for (std::size_t c = 0; c < n; ++c) {
            const auto& e = row[c];
            const std::string loc = where + "[" + std::to_string(r + 1) + "," + std::to_string(c + 1) + "]";
            if (!e.is_number()) fail(loc, "expected 0 or 1");
            const double v = e.get<double>();
            if (v != 0.0 && v != 1.0) {
                std::ostringstream os;
                os << "value " << e.dump();
                throw ValidationError(ErrorKind::NonBinary, loc, os.str());
            }
            entries.push_back(static_cast<int>(v));
        }
    }
    return entries;
}

inline TransitionMatrix parse_omega(const json& j, const std::string& where) {
    std::size_t n = 0;
    auto entries = parse_binary_square(j, where, n);
    return TransitionMatrix(n, std::move(entries));
}

inline IntMatrix parse_int_matrix(const json& j, const std::string& where) {
    std::size_t n = 0;
    auto entries = parse_binary_square(j, where, n);
    return IntMatrix(n, n, std::vector<std::int64_t>(entries.begin(), entries.end()));
}

inline KStepSpec parse_kstep(const json& j, std::size_t alphabet) {
    if (!j.is_object()) fail("kstep", "expected an object");
    if (!j.contains("k")) fail("kstep", "missing \"k\"");
    if (!j.contains("allowed")) fail("kstep", "missing \"allowed\"");
    KStepSpec ks;
    ks.k = positive_int(j["k"], "kstep.k");
    const auto& allowed = j["allowed"];
    if (!allowed.is_array()) fail("kstep.allowed", "expected an array of tuples");
    for (std::size_t t = 0; t < allowed.size(); ++t) {
        const std::string where = "kstep.allowed[" + std::to_string(t + 1) + "]";
        if (!allowed[t].is_array()) fail(where, "expected a tuple");
        Tuple tup;
        for (std::size_t q = 0; q < allowed[t].size(); ++q) {
            const auto& e = allowed[t][q];
            const std::string loc = where + "[" + std::to_string(q + 1) + "]";
            if (!e.is_number_integer()) fail(loc, "expected an integer letter");
            const auto v = e.get<std::int64_t>();
            if (v < 1 || static_cast<std::size_t>(v) > alphabet)
                throw ValidationError(ErrorKind::IndexOutOfRange, loc,
                                      "letter " + std::to_string(v) + " not in 1.." + std::to_string(alphabet));
            tup.push_back(static_cast<std::size_t>(v - 1));
        }
        ks.allowed.push_back(std::move(tup));
    }
    // validates tuple lengths and emptiness
    KStepConstraint(alphabet, ks.k, ks.allowed);
    return ks;
}

inline LiftMeta parse_lift(const json& j) {
    if (!j.is_object()) fail("lift", "expected an object");
    LiftMeta meta;
    if (!j.contains("blocks") || !j.contains("block_dim")) fail("lift", "missing \"blocks\" or \"block_dim\"");
    meta.blocks = positive_int(j["blocks"], "lift.blocks");
    meta.block_dim = positive_int(j["block_dim"], "lift.block_dim");
    if (j.contains("factors")) {
        if (!j["factors"].is_array()) fail("lift.factors", "expected an array");
        for (std::size_t i = 0; i < j["factors"].size(); ++i)
            meta.factors.push_back(parse_int_matrix(j["factors"][i], "lift.factors[" + std::to_string(i + 1) + "]"));
    }
    if (j.contains("source_omega")) meta.source_omega = parse_omega(j["source_omega"], "lift.source_omega");
    return meta;
}

} // namespace detail

/// Parses and validates an instance document.
inline InstanceFile parse_instance(const json& j) {
    if (!j.is_object()) detail::fail("instance", "expected a JSON object");
    InstanceFile f;
    if (!j.contains("dimension")) detail::fail("instance", "missing \"dimension\"");
    f.dimension = detail::positive_int(j["dimension"], "dimension");
    if (j.contains("field")) {
        if (!j["field"].is_string()) detail::fail("field", "expected \"real\" or \"complex\"");
        const auto s = j["field"].get<std::string>();
        if (s == "real") f.field = FieldTag::Real;
        else if (s == "complex") f.field = FieldTag::Complex;
        else detail::fail("field", "expected \"real\" or \"complex\", got \"" + s + "\"");
    }
    if (!j.contains("matrices")) detail::fail("instance", "missing \"matrices\"");
    const auto& ms = j["matrices"];
    if (!ms.is_array()) detail::fail("matrices", "expected an array");
    if (ms.empty()) throw ValidationError(ErrorKind::DimensionMismatch, "matrices", "at least one matrix required");
    for (std::size_t i = 0; i < ms.size(); ++i)
        f.matrices.push_back(detail::parse_matrix(ms[i], f.dimension, f.field, i));

    const bool has_omega = j.contains("omega"), has_kstep = j.contains("kstep");
    if (has_omega == has_kstep)
        throw ValidationError(ErrorKind::DimensionMismatch, "instance",
                              "exactly one of \"omega\" and \"kstep\" must be present");
    if (has_omega) {
        f.omega = detail::parse_omega(j["omega"], "omega");
        if (f.omega->size() != f.matrices.size())
            throw ValidationError(ErrorKind::DimensionMismatch, "omega",
                                  std::to_string(f.matrices.size()) + " matrices but omega is " +
                                      std::to_string(f.omega->size()) + "x" + std::to_string(f.omega->size()));
    } else {
        f.kstep = detail::parse_kstep(j["kstep"], f.matrices.size());
    }
    if (j.contains("lift")) {
        f.lift = detail::parse_lift(j["lift"]);
        if (f.lift->blocks * f.lift->block_dim != f.dimension)
            throw ValidationError(ErrorKind::DimensionMismatch, "lift",
                                  "blocks * block_dim does not equal dimension");
    }
    return f;
}

inline InstanceFile parse_instance_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return parse_instance(j);
}

inline InstanceFile load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance_text(ss.str());
}

//---------------------------------------------------------------------------
// Serialisation
//---------------------------------------------------------------------------
inline ordered_json entry_json(const Complex& x, FieldTag field) {
    if (field == FieldTag::Real) return x.real();
    return ordered_json::array({x.real(), x.imag()});
}

template <MatrixScalar T>
ordered_json matrix_json(const Matrix<T>& m, FieldTag field = FieldTag::Real) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if constexpr (std::same_as<T, std::int64_t>) row.push_back(m(r, c));
            else row.push_back(entry_json(Complex(m(r, c)), field));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ordered_json omega_json(const TransitionMatrix& omega) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < omega.size(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < omega.size(); ++j) row.push_back(omega(i, j) ? 1 : 0);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ordered_json to_json(const InstanceFile& f) {
    ordered_json j;
    j["dimension"] = f.dimension;
    j["field"] = f.field == FieldTag::Real ? "real" : "complex";
    ordered_json ms = ordered_json::array();
    for (const auto& m : f.matrices) ms.push_back(matrix_json(m, f.field));
    j["matrices"] = std::move(ms);
    if (f.omega) j["omega"] = omega_json(*f.omega);
    if (f.kstep) {
        ordered_json allowed = ordered_json::array();
        for (const auto& t : f.kstep->allowed) {
            ordered_json tup = ordered_json::array();
            for (auto v : t) tup.push_back(v + 1);
            allowed.push_back(std::move(tup));
        }
        j["kstep"] = {{"k", f.kstep->k}, {"allowed", std::move(allowed)}};
    }
    if (f.lift) {
        ordered_json lift;
        lift["blocks"] = f.lift->blocks;
        lift["block_dim"] = f.lift->block_dim;
        ordered_json factors = ordered_json::array();
        for (const auto& fm : f.lift->factors) factors.push_back(matrix_json(fm));
        lift["factors"] = std::move(factors);
        if (f.lift->source_omega) lift["source_omega"] = omega_json(*f.lift->source_omega);
        j["lift"] = std::move(lift);
    }
    return j;
}

template <FieldScalar T>
InstanceFile make_instance(const MatrixSet<T>& set, const TransitionMatrix& omega) {
    InstanceFile f;
    f.dimension = set.dim();
    f.field = set.field();
    for (const auto& m : set.members()) f.matrices.push_back(matrix_cast<Complex>(m));
    f.omega = omega;
    return f;
}

/// Instance file of the lift: the lifted members with every transition
/// allowed, plus the block layout.
template <FieldScalar T>
InstanceFile lift_instance(const LiftedSet<T>& lifted) {
    auto f = make_instance(lifted.members(), TransitionMatrix::all_ones(lifted.blocks()));
    f.lift = LiftMeta{lifted.blocks(), lifted.block_dim(), lifted.factors(), lifted.omega()};
    return f;
}

/// 64-bit FNV-1a of the canonical serialisation.
inline std::string instance_hash(const InstanceFile& f) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(f).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Rounds to 12 significant digits so reports are byte-stable.
inline double report_number(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x == 0.0 ? 0.0 : x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
    return buf;
}

inline std::optional<NormKind> parse_norm(std::string_view s) {
    if (s == "rowsum") return NormKind::RowSumMax;
    if (s == "colsum") return NormKind::ColSumMax;
    if (s == "frobenius") return NormKind::Frobenius;
    return std::nullopt;
}

inline std::optional<WordClass> parse_word_class(std::string_view s) {
    for (auto c : all_word_classes)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

} // namespace mjsr::io
