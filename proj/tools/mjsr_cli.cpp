// mjsr: bounds, lifts, verification and word listings for constrained
// matrix products.

#include <mjsr/io.hpp>
#include <mjsr/mjsr.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

using namespace mjsr;
using io::ordered_json;

namespace {

enum Exit : int { Ok = 0, VerifyFailed = 1, ParseFailed = 2, Invalid = 3, OverBudget = 4 };

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string file;
    std::size_t n_max = 8;
    std::size_t n = 2;
    std::string norm = "rowsum";
    std::string cls = "markov";
    bool compare_classes = false;
    double tol = 1e-9;
    double rel_tol = default_rel_tol;
    std::string format = "text";
    double budget = 1e7;
    unsigned threads = 0;
    std::string claimed;

    NormKind norm_kind() const { return *io::parse_norm(norm); }
    WordClass word_class() const { return *io::parse_word_class(cls); }
    unsigned thread_count() const { return threads ? threads : std::max(1u, std::thread::hardware_concurrency()); }
};

struct Verdict {
    std::string name;
    bool passed = true;
    double max_diff = 0;
    ordered_json details = ordered_json::array();
};

struct Aggregates {
    double best_lower = 0, best_upper = 0, gap = 0, alpha = 0;
};

struct Report {
    std::string command;
    std::string hash;
    std::string norm;
    double rel_tol = 0, tol = 0;
    std::vector<BoundPoint> points;
    std::optional<Aggregates> aggregates;
    std::vector<Verdict> verdicts;

    bool passed() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
    }
};

double num(double x) { return io::report_number(x); }

void check_budget(std::uint64_t estimate, const Options& o) {
    if (static_cast<double>(estimate) > o.budget)
        throw BudgetExceeded("estimated " + std::to_string(estimate) + " products exceed the budget of " +
                             io::format_number(o.budget) + " (raise it with --budget)");
}

//---------------------------------------------------------------------------
// Rendering
//---------------------------------------------------------------------------
ordered_json point_json(const BoundPoint& p) {
    ordered_json j;
    j["n"] = p.n;
    j["class"] = to_string(p.cls);
    j["kind"] = to_string(p.kind);
    j["value"] = num(p.value);
    j["empty"] = p.empty_word_set;
    if (p.lifted) j["lifted"] = true;
    return j;
}

ordered_json report_json(const Report& r) {
    ordered_json j;
    j["tool"] = "mjsr";
    j["version"] = std::string(version);
    j["command"] = r.command;
    j["instance_hash"] = r.hash;
    j["norm"] = r.norm;
    j["tolerances"] = {{"rel_tol", r.rel_tol}, {"tol", r.tol}};
    ordered_json pts = ordered_json::array();
    for (const auto& p : r.points) pts.push_back(point_json(p));
    j["points"] = std::move(pts);
    if (r.aggregates) {
        const auto& a = *r.aggregates;
        j["aggregates"] = {{"best_lower", num(a.best_lower)},
                           {"best_upper", num(a.best_upper)},
                           {"gap", num(a.gap)},
                           {"alpha", num(a.alpha)}};
    } else {
        j["aggregates"] = nullptr;
    }
    ordered_json vs = ordered_json::array();
    for (const auto& v : r.verdicts)
        vs.push_back({{"name", v.name}, {"passed", v.passed}, {"max_diff", num(v.max_diff)}, {"details", v.details}});
    j["verdicts"] = std::move(vs);
    return j;
}

std::string report_text(const Report& r) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "mjsr %s  %s  instance %s\nnorm %s  rel_tol %s  tol %s\n",
                  std::string(version).c_str(), r.command.c_str(), r.hash.c_str(), r.norm.c_str(),
                  io::format_number(r.rel_tol).c_str(), io::format_number(r.tol).c_str());
    out += line;
    if (!r.points.empty()) {
        std::snprintf(line, sizeof line, "\n%4s  %-9s %-9s %-18s %s\n", "n", "class", "kind", "value", "empty");
        out += line;
        for (const auto& p : r.points) {
            std::snprintf(line, sizeof line, "%4zu  %-9s %-9s %-18s %s\n", p.n, std::string(to_string(p.cls)).c_str(),
                          std::string(to_string(p.kind)).c_str(), io::format_number(p.value).c_str(),
                          p.empty_word_set ? "yes" : "no");
            out += line;
        }
    }
    if (r.aggregates) {
        const auto& a = *r.aggregates;
        std::snprintf(line, sizeof line, "\nbest_lower %s\nbest_upper %s\ngap        %s\nalpha      %s\n",
                      io::format_number(a.best_lower).c_str(), io::format_number(a.best_upper).c_str(),
                      io::format_number(a.gap).c_str(), io::format_number(a.alpha).c_str());
        out += line;
    }
    if (!r.verdicts.empty()) out += "\n";
    for (const auto& v : r.verdicts) {
        std::snprintf(line, sizeof line, "%-20s %s  max_diff %s\n", v.name.c_str(), v.passed ? "PASS" : "FAIL",
                      io::format_number(v.max_diff).c_str());
        out += line;
    }
    return out;
}

void emit(const Report& r, const Options& o) {
    if (o.format == "json") std::cout << report_json(r).dump(2) << "\n";
    else std::cout << report_text(r);
}

Report new_report(const std::string& command, const io::InstanceFile& f, const Options& o) {
    Report r;
    r.command = command;
    r.hash = io::instance_hash(f);
    r.norm = o.norm;
    r.rel_tol = o.rel_tol;
    r.tol = o.tol;
    return r;
}

//---------------------------------------------------------------------------
// Instance resolution
//---------------------------------------------------------------------------
/// The (set, omega) pair a file stands for: kstep files are recoded first.
template <FieldScalar T>
struct Resolved {
    MatrixSet<T> set;
    TransitionMatrix omega;
};

template <FieldScalar T>
MatrixSet<T> set_of(const io::InstanceFile& f) {
    if constexpr (std::same_as<T, double>) return f.real_set();
    else return f.complex_set();
}

template <FieldScalar T>
Resolved<T> resolve(const io::InstanceFile& f) {
    auto set = set_of<T>(f);
    if (f.kstep) {
        auto rec = recode(f.constraint(), set);
        return {std::move(rec.set), std::move(rec.omega)};
    }
    validate_instance(set, *f.omega);
    return {std::move(set), *f.omega};
}

//---------------------------------------------------------------------------
// bounds
//---------------------------------------------------------------------------
template <FieldScalar T>
Report bounds_of_lift_file(const io::InstanceFile& f, const Options& o) {
    if (o.compare_classes) throw UsageError("--compare-classes needs an instance with omega or kstep");
    const auto& meta = *f.lift;
    const auto set = set_of<T>(f);
    check_budget(estimated_products(TransitionMatrix::all_ones(set.size()), o.n_max), o);
    Report r = new_report("bounds", f, o);
    Aggregates a;
    for (const auto& m : set.members())
        a.alpha = std::max(a.alpha, block_norm(m, meta.blocks, meta.block_dim, o.norm_kind()));
    for (std::size_t n = 1; n <= o.n_max; ++n) {
        const auto [upper, lower] =
            block_family_bounds(set, meta.blocks, meta.block_dim, n, o.norm_kind(), o.rel_tol, o.thread_count());
        r.points.push_back(upper);
        r.points.push_back(lower);
        a.best_upper = n == 1 ? upper.value : std::min(a.best_upper, upper.value);
        a.best_lower = std::max(a.best_lower, lower.value);
    }
    a.gap = a.best_upper - a.best_lower;
    r.aggregates = a;
    return r;
}

template <FieldScalar T>
Report cmd_bounds(const io::InstanceFile& f, const Options& o) {
    if (f.lift) return bounds_of_lift_file<T>(f, o);
    const auto in = resolve<T>(f);
    check_budget(estimated_products(in.omega, o.n_max), o);
    Report r = new_report("bounds", f, o);

    if (o.compare_classes) {
        Verdict v{"class_chain"};
        for (std::size_t n = 1; n <= o.n_max; ++n) {
            const auto cc = alternative_class_chain(in.set, in.omega, n, o.norm_kind(), o.thread_count());
            for (const auto& p : {cc.periodic, cc.infinite, cc.markov, cc.chain}) r.points.push_back(p);
            const bool ok = cc.monotone();
            v.passed = v.passed && ok;
            v.details.push_back({{"n", n}, {"monotone", ok}, {"chain_minus_markov", num(cc.chain.value - cc.markov.value)}});
        }
        r.verdicts.push_back(std::move(v));
        return r;
    }

    const auto upper_class = o.word_class();
    if (upper_class == WordClass::PeriodicallyExtendable)
        throw UsageError("--class periodic gives no upper bound; use chain, markov or infinite");
    const auto rep = sandwich(in.set, in.omega, o.n_max, o.norm_kind(), o.rel_tol, upper_class, o.thread_count());
    for (const auto& p : rep.points)
        if (p.kind == BoundKind::SpectralBound || p.cls == upper_class) r.points.push_back(p);
    r.aggregates = Aggregates{rep.best_lower, rep.best_upper, rep.gap, rep.alpha};
    return r;
}

//---------------------------------------------------------------------------
// lift / kstep-recode
//---------------------------------------------------------------------------
template <FieldScalar T>
ordered_json cmd_lift(const io::InstanceFile& f) {
    const auto in = resolve<T>(f);
    return io::to_json(io::lift_instance(LiftedSet<T>(in.set, in.omega)));
}

template <FieldScalar T>
ordered_json cmd_kstep_recode(const io::InstanceFile& f) {
    if (!f.kstep) throw UsageError("kstep-recode needs an instance with a kstep block");
    const auto rec = recode(f.constraint(), set_of<T>(f));
    auto j = io::to_json(io::make_instance(rec.set, rec.omega));
    ordered_json states = ordered_json::array();
    for (const auto& u : rec.states) {
        ordered_json t = ordered_json::array();
        for (auto x : u) t.push_back(x + 1);
        states.push_back(std::move(t));
    }
    j["states"] = std::move(states);
    return j;
}

//---------------------------------------------------------------------------
// verify
//---------------------------------------------------------------------------
Verdict factor_product_oracles(const TransitionMatrix& omega, std::size_t n_max) {
    Verdict v{"factor_products"};
    const TransitionDigraph g(omega);
    for (std::size_t n = 1; n <= n_max; ++n) {
        std::size_t words = 0, failures = 0;
        for (const auto& w : WordStream(g, n, WordClass::Chain)) {
            ++words;
            const auto explicit_product = factor_product(omega, w);
            const auto s = factor_product_structure(omega, w);
            const auto classes = classify(w, g);
            bool diag = false;
            for (std::size_t i = 0; i < omega.size(); ++i) diag = diag || explicit_product(i, i) != 0;
            const bool ok = s.to_matrix(omega.size()) == explicit_product &&
                            !explicit_product.is_zero() == classes.contains(WordClass::Markov) &&
                            diag == classes.contains(WordClass::PeriodicallyExtendable) &&
                            (!diag || explicit_product(w.front(), w.front()) != 0);
            failures += !ok;
        }
        v.passed = v.passed && failures == 0;
        v.details.push_back({{"n", n}, {"chain_words", words}, {"failures", failures}});
    }
    return v;
}

template <FieldScalar T>
void verify_claimed_lift(const Resolved<T>& in, const std::string& path, const Options& o, Report& r) {
    const auto claimed = io::load_instance(path);
    const auto expected = LiftedSet<T>(in.set, in.omega);
    const std::size_t blocks = expected.blocks(), d = expected.block_dim();

    Verdict members{"claimed_lift_members"};
    const auto cs = set_of<T>(claimed);
    if (cs.size() != blocks || cs.dim() != blocks * d) {
        members.passed = false;
        members.max_diff = std::numeric_limits<double>::infinity();
        members.details.push_back({{"reason", "shape does not match the lift"}});
        r.verdicts.push_back(std::move(members));
        return;
    }
    for (std::size_t i = 0; i < blocks; ++i) {
        double diff = 0;
        for (std::size_t q = 0; q < cs[i].entries().size(); ++q)
            diff = std::max(diff, std::abs(cs[i].entries()[q] - expected.members()[i].entries()[q]));
        members.max_diff = std::max(members.max_diff, diff);
        const bool ok = diff <= o.tol;
        members.passed = members.passed && ok;
        members.details.push_back({{"member", i + 1}, {"max_diff", num(diff)}, {"passed", ok}});
    }
    r.verdicts.push_back(std::move(members));

    Verdict bounds{"claimed_lift_bounds"};
    for (std::size_t n = 1; n <= o.n_max; ++n) {
        const auto [up, low] = block_family_bounds(cs, blocks, d, n, o.norm_kind(), o.rel_tol, o.thread_count());
        const auto rn = rho_n(in.set, in.omega, n, WordClass::Markov, o.norm_kind(), o.thread_count());
        const auto rh = rho_hat_n(in.set, in.omega, n, WordClass::PeriodicallyExtendable, o.rel_tol, o.thread_count());
        const double dn = std::abs(up.value - rn.value), ds = std::abs(low.value - rh.value);
        const bool ok = dn <= o.tol * (1 + rn.value) && ds <= o.tol * (1 + rh.value);
        bounds.passed = bounds.passed && ok;
        bounds.max_diff = std::max({bounds.max_diff, dn, ds});
        bounds.details.push_back({{"n", n}, {"norm_diff", num(dn)}, {"spectral_diff", num(ds)}, {"passed", ok}});
    }
    r.verdicts.push_back(std::move(bounds));
}

template <FieldScalar T>
Report cmd_verify(const io::InstanceFile& f, const Options& o) {
    const auto in = resolve<T>(f);
    check_budget(estimated_products(TransitionMatrix::all_ones(in.omega.size()), o.n_max), o);
    Report r = new_report("verify", f, o);
    const unsigned threads = o.thread_count();

    Verdict equality{"lift_equality"};
    for (std::size_t n = 1; n <= o.n_max; ++n) {
        const auto c = verify_theorem_main(in.set, in.omega, n, o.norm_kind(), o.rel_tol, o.tol, threads);
        equality.passed = equality.passed && c.passed;
        equality.max_diff = std::max(equality.max_diff, c.max_abs_diff);
        equality.details.push_back({{"n", n},
                                   {"lifted_norm", num(c.lhs_norm)},
                                   {"markov_norm", num(c.rhs_norm)},
                                   {"lifted_spectral", num(c.lhs_spec)},
                                   {"periodic_spectral", num(c.rhs_spec)},
                                   {"max_abs_diff", num(c.max_abs_diff)},
                                   {"passed", c.passed}});
    }
    r.verdicts.push_back(std::move(equality));
    r.verdicts.push_back(factor_product_oracles(in.omega, o.n_max));

    Verdict chain{"class_chain"};
    for (std::size_t n = 1; n <= o.n_max; ++n) {
        const auto cc = alternative_class_chain(in.set, in.omega, n, o.norm_kind(), threads);
        const bool ok = cc.monotone();
        chain.passed = chain.passed && ok;
        chain.details.push_back({{"n", n},
                                 {"periodic", num(cc.periodic.value)},
                                 {"infinite", num(cc.infinite.value)},
                                 {"markov", num(cc.markov.value)},
                                 {"chain", num(cc.chain.value)},
                                 {"passed", ok}});
    }
    r.verdicts.push_back(std::move(chain));

    const auto rep = sandwich(in.set, in.omega, o.n_max, o.norm_kind(), o.rel_tol, WordClass::Markov, threads);
    r.points = rep.points;
    r.aggregates = Aggregates{rep.best_lower, rep.best_upper, rep.gap, rep.alpha};
    Verdict cross{"cross_bound"};
    for (const auto& cb : rep.cross_bounds) {
        cross.passed = cross.passed && cb.holds;
        cross.details.push_back(
            {{"n", cb.n}, {"lhs", num(cb.lhs)}, {"rhs", num(cb.rhs)}, {"margin", num(cb.margin)}, {"holds", cb.holds}});
    }
    r.verdicts.push_back(std::move(cross));

    if (f.kstep) {
        const auto eq = radius_equivalence_check(f.constraint(), set_of<T>(f), std::max(o.n_max, f.kstep->k),
                                                 o.norm_kind(), o.rel_tol, o.tol);
        Verdict v{"kstep_equivalence", eq.passed, eq.lower_diff};
        for (const auto& s : eq.shift_checks)
            v.details.push_back({{"n", s.n}, {"direct", num(s.direct)}, {"bound", num(s.bound)}, {"holds", s.holds}});
        r.verdicts.push_back(std::move(v));
    }

    if (!o.claimed.empty()) verify_claimed_lift(in, o.claimed, o, r);
    return r;
}

//---------------------------------------------------------------------------
// words
//---------------------------------------------------------------------------
int cmd_words(const io::InstanceFile& f, const Options& o) {
    std::vector<std::vector<std::size_t>> words;
    std::uint64_t expected = 0;
    if (f.kstep) {
        if (o.word_class() != WordClass::Markov)
            throw UsageError("words on a kstep instance lists admissible words; only --class markov applies");
        const auto c = f.constraint();
        const auto rec = recode(c, f.real_set());
        const auto estimate = o.n >= c.order() ? count(rec.omega, o.n - c.order() + 1, WordClass::Markov) : 0;
        check_budget(detail::sat_mul(estimate, o.n), o);
        words = kstep_words(c, o.n);
        expected = estimate;
    } else {
        const TransitionDigraph g(*f.omega);
        expected = count(g, o.n, o.word_class());
        check_budget(detail::sat_mul(expected, o.n), o);
        for (const auto& w : WordStream(g, o.n, o.word_class())) words.push_back(w.letters);
    }
    const bool count_ok = words.size() == expected;

    if (o.format == "json") {
        ordered_json j;
        j["tool"] = "mjsr";
        j["version"] = std::string(version);
        j["command"] = "words";
        j["instance_hash"] = io::instance_hash(f);
        j["n"] = o.n;
        j["class"] = o.cls;
        ordered_json ws = ordered_json::array();
        for (const auto& w : words) {
            ordered_json a = ordered_json::array();
            for (auto x : w) a.push_back(x + 1);
            ws.push_back(std::move(a));
        }
        j["words"] = std::move(ws);
        j["count"] = words.size();
        j["count_check"] = count_ok;
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& w : words) std::cout << Word{w}.to_string() << "\n";
        std::cout << "count " << words.size() << (count_ok ? " (matches transfer count)" : " (MISMATCH)") << "\n";
    }
    return count_ok ? Ok : VerifyFailed;
}

//---------------------------------------------------------------------------
template <typename Fn>
int guarded(Fn fn) {
    try {
        return fn();
    } catch (const io::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return ParseFailed;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return ParseFailed;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return Invalid;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return OverBudget;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return VerifyFailed;
    }
}

template <typename Fn>
auto by_field(const io::InstanceFile& f, Fn fn) {
    return f.field == FieldTag::Complex ? fn(Complex{}) : fn(double{});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bounds on the joint spectral radius of matrix products with Markov constraints"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    Options o;
    const auto norms = CLI::IsMember({"rowsum", "colsum", "frobenius"});
    const auto classes = CLI::IsMember({"chain", "markov", "infinite", "periodic"});
    const auto formats = CLI::IsMember({"text", "json"});

    auto common = [&](CLI::App* sub) {
        sub->add_option("file", o.file, "instance file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--format", o.format, "output format")->check(formats)->capture_default_str();
        sub->add_option("--threads", o.threads, "worker threads (0: all cores)")->capture_default_str();
    };
    auto numeric = [&](CLI::App* sub) {
        sub->add_option("--n-max", o.n_max, "largest word length")->check(CLI::Range(1, 64))->capture_default_str();
        sub->add_option("--norm", o.norm, "matrix norm")->check(norms)->capture_default_str();
        sub->add_option("--tol", o.tol, "verification tolerance")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--budget", o.budget, "maximum estimated number of products")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };

    auto* bounds = app.add_subcommand("bounds", "lower and upper bounds for n = 1..n-max");
    common(bounds);
    numeric(bounds);
    bounds->add_option("--class", o.cls, "word class of the upper bound")->check(classes)->capture_default_str();
    bounds->add_flag("--compare-classes", o.compare_classes, "norm bounds of all four word classes");

    auto* lift = app.add_subcommand("lift", "write the lifted instance");
    common(lift);

    auto* verify = app.add_subcommand("verify", "check the lift identities and inequalities");
    common(verify);
    numeric(verify);
    verify->add_option("--lift", o.claimed, "lifted instance to check against")->check(CLI::ExistingFile);

    auto* words = app.add_subcommand("words", "list the words of one length and class");
    common(words);
    words->add_option("--n", o.n, "word length")->check(CLI::Range(1, 64))->capture_default_str();
    words->add_option("--class", o.cls, "word class")->check(classes)->capture_default_str();
    words->add_option("--budget", o.budget, "maximum estimated letters listed")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* kstep = app.add_subcommand("kstep-recode", "write the order-1 recoding of a kstep instance");
    common(kstep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : ParseFailed;
    }

    return guarded([&]() -> int {
        const auto f = io::load_instance(o.file);
        if (bounds->parsed()) {
            const auto r = by_field(f, [&](auto t) { return cmd_bounds<decltype(t)>(f, o); });
            emit(r, o);
            return Ok;
        }
        if (lift->parsed()) {
            std::cout << by_field(f, [&](auto t) { return cmd_lift<decltype(t)>(f); }).dump(2) << "\n";
            return Ok;
        }
        if (verify->parsed()) {
            const auto r = by_field(f, [&](auto t) { return cmd_verify<decltype(t)>(f, o); });
            emit(r, o);
            return r.passed() ? Ok : VerifyFailed;
        }
        if (words->parsed()) return cmd_words(f, o);
        std::cout << by_field(f, [&](auto t) { return cmd_kstep_recode<decltype(t)>(f); }).dump(2) << "\n";
        return Ok;
    });
}
