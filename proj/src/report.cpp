#include "hardylab/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "hardylab/certificates.hpp"
#include "hardylab/conformal.hpp"
#include "hardylab/femlab.hpp"
#include "hardylab/potentials.hpp"
#include "hardylab/speclog.hpp"
#include "hardylab/sturm1d.hpp"

namespace hardylab::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "hardylab 1.0.0";

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CommandSpec {
    std::set<std::string> allowed;
    std::function<void(const RunConfig&, Report&)> run;
};

void finish(Report& rep, const RunConfig& cfg, json results, bool pass,
            std::vector<std::string> warnings = {}) {
    rep.doc["command"] = cfg.command;
    json params(json::value_t::object);
    for (const auto& [k, v] : cfg.params) params[k] = v;
    rep.doc["params"] = params;
    rep.doc["results"] = std::move(results);
    rep.doc["provenance"] = {{"version", kVersion}};
    rep.doc["warnings"] = warnings;
    rep.doc["pass"] = pass;
    rep.pass = pass;
    if (rep.csv.empty()) {
        std::ostringstream os;
        os << "key,value\n";
        for (auto& [k, v] : rep.doc["results"].items())
            if (v.is_number())
                os << k << "," << fmt17(v.get<double>()) << "\n";
            else if (v.is_boolean())
                os << k << "," << (v.get<bool>() ? "true" : "false") << "\n";
        rep.csv = os.str();
    }
}

json trace_json(const std::vector<std::pair<int, double>>& trace) {
    json arr = json::array();
    for (auto& [res, val] : trace) arr.push_back({{"resolution", res}, {"value", val}});
    return arr;
}

int require_dim(const RunConfig& cfg, int min_n = 2) {
    const long n = cfg.integer("n", 3);
    if (n < min_n || n > 12) throw ValidationError("n: expected integer in [" +
                                                    std::to_string(min_n) + ", 12]");
    return int(n);
}

uint64_t seed_of(const RunConfig& cfg) { return uint64_t(cfg.integer("seed", 1)); }

// ---- command handlers ----------------------------------------------------

void run_kappa(const RunConfig& cfg, Report& rep) {
    const double tol = cfg.number("tol", 1e-12);
    auto k = speclog::solve_kappa(tol);
    const bool pass = std::abs(k.residual) <= tol &&
                      std::abs(k.kappa - k.kappa_secant) <= 1e-10 * k.kappa;
    finish(rep, cfg,
           {{"kappa", k.kappa},
            {"residual", k.residual},
            {"kappa_secant", k.kappa_secant},
            {"uncertainty", k.uncertainty},
            {"terms", k.terms}},
           pass);
}

void run_speclog(const RunConfig& cfg, Report& rep) {
    const std::string op = cfg.text("op", "eval");
    if (op == "eval") {
        const int k = int(cfg.integer("k", 1));
        const double t = cfg.require_number("t");
        finish(rep, cfg, {{"value", speclog::eval_x(k, t)}, {"tail_bound", 0.0}, {"terms", k}},
               true);
    } else if (op == "prod") {
        const int k = int(cfg.integer("k", 1));
        const double t = cfg.require_number("t");
        finish(rep, cfg, {{"value", speclog::prod_x(k, t)}, {"tail_bound", 0.0}, {"terms", k}},
               true);
    } else if (op == "eta" || op == "bigb") {
        const double t = cfg.require_number("t");
        const double tol = cfg.number("tol", 1e-9);
        SeriesValue v = op == "eta" ? speclog::eta(t, tol) : speclog::big_b(t, tol);
        finish(rep, cfg,
               {{"value", v.value}, {"tail_bound", v.tail_bound}, {"terms", v.terms_used}},
               v.tail_bound <= tol);
    } else if (op == "kappa") {
        run_kappa(cfg, rep);
    } else {
        throw ValidationError("speclog: op must be eval|prod|eta|bigb|kappa");
    }
}

void run_conformal(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    const long samples = cfg.integer("samples", 1000);
    uint64_t state = seed_of(cfg) ? seed_of(cfg) : 1;
    auto next_u = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return (state >> 11) * 0x1.0p-53;
    };
    auto rand_point = [&](bool upper) {
        conformal::PointN p(n);
        for (int i = 0; i < n; ++i) p[i] = 6.0 * next_u() - 3.0;
        if (upper) p[n - 1] = std::abs(p[n - 1]) + 1e-3;
        return p;
    };

    double s_invol = 0.0, s_norm = 0.0, invt_norm = 0.0, kelvin_invol = 0.0, jac_rel = 0.0,
           ball_rel = 0.0;
    bool exterior_ok = true;
    for (long i = 0; i < samples; ++i) {
        conformal::PointN v = rand_point(true);
        conformal::PointN s = conformal::map_s(v);
        conformal::PointN vm = v, vp = v;
        vm[n - 1] -= 1.0;
        vp[n - 1] += 1.0;
        s_invol = std::max(s_invol,
                           conformal::dist(conformal::map_s(s), v) / std::max(1.0, conformal::norm(v)));
        s_norm = std::max(s_norm, std::abs(conformal::norm(s) -
                                           conformal::norm(vm) / conformal::norm(vp)));
        conformal::PointN x = conformal::map_t(v);
        if (!(conformal::norm(x) > 1.0)) exterior_ok = false;
        conformal::PointN xm = x, xp = x;
        xm[n - 1] -= 1.0;
        xp[n - 1] += 1.0;
        invt_norm = std::max(invt_norm, std::abs(conformal::norm(conformal::inv_t(x)) -
                                                 conformal::norm(xm) / conformal::norm(xp)));
        conformal::PointN y = rand_point(false);
        if (conformal::norm(y) > 1e-2)
            kelvin_invol = std::max(kelvin_invol,
                                    conformal::dist(conformal::kelvin(conformal::kelvin(y)), y) /
                                        std::max(1.0, conformal::norm(y)));
        // jacobian vs finite differences on a thinned subset
        if (i % 20 == 0) {
            conformal::PointN w = rand_point(true);
            conformal::PointN we = w;
            we[n - 1] -= 1.0;
            if (conformal::norm(we) > 0.3) {
                const double closed = conformal::jac_t(w);
                auto detfd = [&](double h) {
                    std::vector<std::vector<double>> J(n, std::vector<double>(n));
                    for (int c = 0; c < n; ++c) {
                        conformal::PointN a = w, b = w;
                        a[c] += h;
                        b[c] -= h;
                        auto xa = conformal::map_t(a), xb = conformal::map_t(b);
                        for (int r = 0; r < n; ++r) J[r][c] = (xa[r] - xb[r]) / (2 * h);
                    }
                    double det = 1.0;
                    for (int c = 0; c < n; ++c) {
                        int piv = c;
                        for (int r = c + 1; r < n; ++r)
                            if (std::abs(J[r][c]) > std::abs(J[piv][c])) piv = r;
                        std::swap(J[c], J[piv]);
                        det *= J[c][c];
                        for (int r = c + 1; r < n; ++r) {
                            double f = J[r][c] / J[c][c];
                            for (int k = c; k < n; ++k) J[r][k] -= f * J[c][k];
                        }
                    }
                    return std::abs(det);
                };
                const double fd = (4.0 * detfd(0.5e-5) - detfd(1e-5)) / 3.0;
                jac_rel = std::max(jac_rel, std::abs(fd - closed) / closed);
            }
        }
        // image of centered spheres
        if (i % 10 == 0) {
            const double r = 0.2 + 0.6 * next_u();
            conformal::BallSpec img = conformal::image_ball(n, r);
            conformal::PointN dir = rand_point(false);
            const double nn = conformal::norm(dir);
            if (nn > 1e-3) {
                for (double& c : dir) c *= r / nn;
                conformal::PointN de = dir;
                de[n - 1] -= 1.0;
                conformal::PointN dpe = dir;
                dpe[n - 1] += 1.0;
                if (conformal::norm(de) > 1e-3 && conformal::norm(dpe) > 1e-3) {
                    conformal::PointN tx = conformal::map_t(dir);
                    ball_rel = std::max(ball_rel,
                                        std::abs(conformal::dist(tx, img.center) - img.radius) /
                                            img.radius);
                }
            }
        }
    }

    // energy invariance through the kelvin and T pullbacks
    conformal::PointN c = conformal::unit_en(n);
    c[n - 1] = 2.0;
    auto f = conformal::radial_bump(c, 0.0, 0.45);
    auto et = conformal::pullback_energy_pair(n, f, conformal::MapKind::t, n <= 3 ? 32 : 18);
    auto ek = conformal::pullback_energy_pair(n, f, conformal::MapKind::kelvin, n <= 3 ? 32 : 18);
    const double energy_rel = std::max(std::abs(et.source - et.image) / et.image,
                                       std::abs(ek.source - ek.image) / ek.image);

    const bool pass = s_invol < 1e-12 && s_norm < 1e-12 && invt_norm < 1e-12 &&
                      kelvin_invol < 1e-13 && exterior_ok && jac_rel < 1e-6 &&
                      ball_rel < 1e-10 && energy_rel < 1e-6;
    finish(rep, cfg,
           {{"s_involution_max", s_invol},
            {"s_norm_identity_max", s_norm},
            {"invt_norm_identity_max", invt_norm},
            {"kelvin_involution_max", kelvin_invol},
            {"t_maps_upper_to_exterior", exterior_ok},
            {"jacobian_fd_max_rel", jac_rel},
            {"image_ball_max_rel", ball_rel},
            {"energy_invariance_rel", energy_rel},
            {"sigma_n", conformal::sigma_n(n)}},
           pass);
}

void run_cap_eig(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    const double theta = cfg.require_number("theta");
    const std::string variant = cfg.text("variant", "cone");
    sturm1d::CapProblem p;
    p.n = n;
    p.angle = theta;
    p.index = int(cfg.integer("k", 1));
    if (variant == "cone")
        p.variant = sturm1d::CapVariant::cone_cap;
    else if (variant == "example")
        p.variant = sturm1d::CapVariant::example_cap;
    else
        throw ValidationError("cap-eig: variant must be cone|example");
    auto sol = sturm1d::cap_eigenpair(p, int(cfg.integer("resolution", 512)));
    std::ostringstream os;
    os << "resolution,value\n";
    for (auto& [r, v] : sol.estimate.trace) os << r << "," << fmt17(v) << "\n";
    rep.csv = os.str();
    finish(rep, cfg,
           {{"value", sol.estimate.value},
            {"residual", sol.estimate.residual},
            {"trace", trace_json(sol.estimate.trace)}},
           sol.estimate.residual < 1e-4);
}

void run_annulus_1d(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    const double a = cfg.require_number("a"), b = cfg.require_number("b");
    auto r = sturm1d::radial_annulus_constant(n, a, b, int(cfg.integer("resolution", 512)));
    const double gap = std::abs(r.numeric.value - r.closed_form);
    finish(rep, cfg,
           {{"closed_form", r.closed_form},
            {"numeric", r.numeric.value},
            {"difference", gap},
            {"trace", trace_json(r.numeric.trace)}},
           gap <= 1e-6 * std::max(1.0, r.closed_form));
}

void run_annulus(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    const double tau = cfg.require_number("tau");
    const int levels = int(cfg.integer("levels", 3));
    auto r = femlab::lambda_tau(n, tau, levels, cfg.number("h0", 1.0 / 12.0),
                                cfg.number("grading", 1.7), cfg.number("tol", 1e-9));
    std::ostringstream os;
    os << "level,h,dofs,eigenvalue,residual\n";
    for (size_t lev = 0; lev < r.level_dofs.size(); ++lev)
        os << lev << "," << fmt17(r.level_h[lev]) << "," << r.level_dofs[lev] << ","
           << fmt17(r.estimate.trace[lev].second) << "," << fmt17(r.level_residual[lev]) << "\n";
    rep.csv = os.str();
    const std::string dump = cfg.text("dump_mesh", "");
    if (!dump.empty()) {
        femlab::MeridianDomain dom;
        dom.kind = femlab::DomainKind::annulus_offcenter;
        dom.n = n;
        dom.tau = tau;
        std::ostringstream ms;
        femlab::write_mesh(femlab::build_meridian_mesh(dom, cfg.number("h0", 1.0 / 12.0),
                                                       cfg.number("grading", 1.7)),
                           ms);
        FILE* fp = std::fopen(dump.c_str(), "w");
        if (!fp) throw ValidationError("annulus: cannot open mesh dump path");
        std::fputs(ms.str().c_str(), fp);
        std::fclose(fp);
    }
    bool monotone = true;
    for (size_t i = 1; i < r.estimate.trace.size(); ++i)
        monotone = monotone &&
                   r.estimate.trace[i].second <= r.estimate.trace[i - 1].second * (1 + 1e-6);
    finish(rep, cfg,
           {{"value", r.estimate.value},
            {"residual", r.estimate.residual},
            {"trace", trace_json(r.estimate.trace)},
            {"mass_quad_rel_error", r.mass_quad_rel_error},
            {"certified_upper_bound", true}},
           monotone);
}

void run_sharpness(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    const double eps = cfg.require_number("eps");
    const double q = sturm1d::sharpness_quotient(n, eps);
    const double target = 0.25 * n * n;
    finish(rep, cfg,
           {{"quotient", q}, {"target", target}, {"excess", q / target - 1.0}},
           q >= target && q < 2.0 * target);
}

void run_verify(const RunConfig& cfg, Report& rep) {
    certificates::InequalitySpec spec;
    spec.id = certificates::inequality_from_string(cfg.text("inequality", "halfball-logseries"));
    spec.n = require_dim(cfg);
    spec.R = cfg.number("R", 1.0);
    spec.rho = cfg.number("rho", 1.0);
    spec.D = cfg.number("D", 0.0);
    spec.m = int(cfg.integer("m", 1));
    spec.sobolev_c = cfg.number("c", 0.0);
    const bool probe = cfg.integer("probe_c", 0) != 0;
    auto re = certificates::random_trial_suite(spec, cfg.integer("trials", 1000), seed_of(cfg), probe);
    json results = {{"violations", re.violations},
                    {"count", re.count},
                    {"seed", re.seed},
                    {"min_value", re.min_value},
                    {"min_quad_error", re.min_quad_error},
                    {"argmin",
                     {{"beta", re.argmin.beta},
                      {"r_lo", re.argmin.r_lo},
                      {"r_hi", re.argmin.r_hi},
                      {"c1", re.argmin.c1},
                      {"c2", re.argmin.c2},
                      {"ang_c", re.argmin.ang_c}}}};
    if (re.probe_c) results["probe_c"] = *re.probe_c;
    finish(rep, cfg, results, re.violations == 0);
}

void run_tau_bounds(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    const double lo = certificates::tau_lower_bound(n);
    const double hi = certificates::tau_upper_bound(n);
    finish(rep, cfg, {{"lower", lo}, {"upper", hi}}, lo > 0.0 && lo <= hi);
}

void run_counterexample(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    auto b = certificates::counterexample_bound(n, cfg.require_number("theta"),
                                                cfg.require_number("rho"));
    const bool implication = !b.cond || b.upper_bound < b.threshold;
    finish(rep, cfg,
           {{"upper_bound", b.upper_bound},
            {"threshold", b.threshold},
            {"lambda1", b.lambda1},
            {"rho_condition", b.rho_condition},
            {"condition_holds", b.cond}},
           implication);
}

void run_divcheck(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    const double R = cfg.number("R", 1.0);
    auto pts = certificates::sample_halfball_points(n, R, cfg.integer("samples", 100), seed_of(cfg));
    auto r = certificates::div_field_check(n, R, pts);
    finish(rep, cfg,
           {{"max_rel_discrepancy", r.max_rel_discrepancy},
            {"min_closed_form_margin", r.min_closed_form_margin},
            {"samples", r.samples}},
           r.max_rel_discrepancy < 1e-5 && r.min_closed_form_margin > 0.0);
}

potentials::PotentialSpec potential_from(const RunConfig& cfg) {
    potentials::PotentialSpec V;
    const std::string fam = cfg.text("family", "logweighted");
    if (fam == "logweighted") {
        V.family = potentials::PotentialFamily::logweighted;
        V.alpha = cfg.number("alpha", 3.0);
    } else if (fam == "power") {
        V.family = potentials::PotentialFamily::power;
        V.s = cfg.number("s", 1.0);
    } else {
        throw ValidationError("potential family must be logweighted|power");
    }
    V.D = cfg.number("D", 1.0);
    return V;
}

void run_subcritical(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    auto r = potentials::subcritical_test(potential_from(cfg), n, cfg.number("tol", 1e-10));
    json results = {{"finite", r.finite}, {"beta", r.beta}};
    if (r.finite)
        results["value"] = r.value;
    else
        results["divergence"] = r.divergence;
    finish(rep, cfg, results, true);
}

void run_crv(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    auto r = potentials::cr_v_estimate(potential_from(cfg), n, cfg.number("rho", 1.0),
                                       cfg.number("r", 0.1), int(cfg.integer("levels", 3)),
                                       cfg.number("lambda", 0.0), cfg.number("tol", 1e-8));
    bool monotone = true;
    for (size_t i = 1; i < r.trace.size(); ++i)
        monotone = monotone && r.trace[i].second <= r.trace[i - 1].second * (1 + 1e-6);
    double saturation = r.trace.size() > 1
                            ? std::abs(r.trace.back().second - r.trace[r.trace.size() - 2].second) /
                                  std::max(1e-300, r.trace.back().second)
                            : 1.0;
    std::vector<std::string> warnings;
    if (saturation > 0.02)
        warnings.push_back(
            "refinement trace not saturated: upper bounds still moving, treat as a trend probe");
    finish(rep, cfg,
           {{"value", r.value},
            {"residual", r.residual},
            {"trace", trace_json(r.trace)},
            {"last_level_rel_change", saturation}},
           monotone, warnings);
}

void run_cone_sobolev(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg, 3);
    auto b = potentials::cone_sobolev_bound(n, cfg.require_number("theta"),
                                            int(cfg.integer("resolution", 512)));
    finish(rep, cfg,
           {{"coarse", b.coarse},
            {"sharp", b.sharp},
            {"mu1", b.mu1},
            {"cap_measure", b.cap_measure},
            {"sobolev_constant", sobolev_constant(n)}},
           b.sharp <= b.coarse * (1 + 1e-9) && b.sharp > 0.0);
}

void run_groundstate(const RunConfig& cfg, Report& rep) {
    const int n = require_dim(cfg);
    const double rho = cfg.number("rho", 1.0);
    auto r = potentials::groundstate_identity_check(n, rho, cfg.number("a", 0.4 * rho),
                                                    cfg.number("b", 1.4 * rho),
                                                    cfg.number("amplitude", 1.0),
                                                    int(cfg.integer("level", 48)));
    finish(rep, cfg,
           {{"lhs", r.lhs}, {"rhs", r.rhs}, {"rel_err", r.rel_err}, {"self_err", r.self_err}},
           r.rel_err < 1e-5);
}

const std::map<std::string, CommandSpec>& registry() {
    static const std::map<std::string, CommandSpec> reg = {
        {"kappa", {{"tol"}, run_kappa}},
        {"speclog", {{"op", "k", "t", "tol"}, run_speclog}},
        {"conformal", {{"n", "samples", "seed"}, run_conformal}},
        {"cap-eig", {{"n", "theta", "variant", "k", "resolution"}, run_cap_eig}},
        {"annulus-1d", {{"n", "a", "b", "resolution"}, run_annulus_1d}},
        {"annulus", {{"n", "tau", "levels", "h0", "grading", "tol", "dump_mesh"}, run_annulus}},
        {"sharpness", {{"n", "eps"}, run_sharpness}},
        {"verify",
         {{"inequality", "n", "trials", "seed", "probe_c", "m", "R", "rho", "D", "c"}, run_verify}},
        {"tau-bounds", {{"n"}, run_tau_bounds}},
        {"counterexample", {{"n", "theta", "rho"}, run_counterexample}},
        {"divcheck", {{"n", "R", "samples", "seed"}, run_divcheck}},
        {"subcritical", {{"family", "alpha", "s", "n", "D", "tol"}, run_subcritical}},
        {"crv",
         {{"family", "alpha", "s", "n", "D", "r", "rho", "levels", "lambda", "tol"}, run_crv}},
        {"cone-sobolev", {{"n", "theta", "resolution"}, run_cone_sobolev}},
        {"groundstate-check", {{"n", "rho", "a", "b", "amplitude", "level"}, run_groundstate}},
    };
    return reg;
}

}  // namespace

double RunConfig::number(const std::string& key, double fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    if (!it->second.is_number()) throw ValidationError(key + ": expected a number");
    return it->second.get<double>();
}

double RunConfig::require_number(const std::string& key) const {
    if (!params.count(key)) throw ValidationError(key + ": required parameter missing");
    return number(key, 0.0);
}

long RunConfig::integer(const std::string& key, long fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    if (!it->second.is_number_integer()) throw ValidationError(key + ": expected an integer");
    return it->second.get<long>();
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    if (!it->second.is_string()) throw ValidationError(key + ": expected a string");
    return it->second.get<std::string>();
}

std::string Report::serialize(const std::string& format) const {
    if (format == "csv") return csv;
    return doc.dump(2) + "\n";
}

const std::vector<std::string>& command_names() {
    static std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, spec] : registry()) v.push_back(name);
        return v;
    }();
    return names;
}

Report dispatch(const RunConfig& cfg) {
    Report rep;
    auto it = registry().find(cfg.command);
    if (it == registry().end()) throw ValidationError("unknown command: " + cfg.command);
    for (const auto& [key, value] : cfg.params)
        if (!it->second.allowed.count(key))
            throw ValidationError(cfg.command + ": unknown parameter '" + key + "'");
    try {
        it->second.run(cfg, rep);
    } catch (const Error& e) {
        rep.doc = {{"command", cfg.command}, {"error", e.what()}, {"pass", false}};
        rep.pass = false;
        rep.csv = "error\n" + std::string(e.what()) + "\n";
    }
    return rep;
}

std::vector<Report> run_batch(const std::string& batch_json_text, int jobs) {
    json doc;
    try {
        doc = json::parse(batch_json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("batch: ") + e.what());
    }
    if (!doc.is_array()) throw ValidationError("batch: expected a JSON array of run configs");

    // malformed entries are recorded, not fatal; only a JSON parse error
    // aborts the whole batch
    std::vector<RunConfig> cfgs(doc.size());
    std::vector<std::string> entry_errors(doc.size());
    for (size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        if (!entry.is_object()) {
            entry_errors[i] = "batch entry must be an object";
            continue;
        }
        RunConfig cfg;
        for (auto& [k, v] : entry.items()) {
            if (k == "command")
                cfg.command = v.is_string() ? v.get<std::string>() : "";
            else if (k == "format")
                cfg.format = v.is_string() ? v.get<std::string>() : "json";
            else if (k == "out")
                cfg.out = v.is_string() ? v.get<std::string>() : "";
            else
                cfg.params[k] = v;
        }
        if (cfg.command.empty())
            entry_errors[i] = "batch entry missing 'command'";
        else
            cfgs[i] = std::move(cfg);
    }

    std::vector<Report> out(cfgs.size());
    jobs = std::max(1, jobs);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cfgs.size()) return;
            if (!entry_errors[i].empty()) {
                out[i].doc = {{"error", entry_errors[i]}, {"pass", false}};
                out[i].pass = false;
                continue;
            }
            try {
                out[i] = dispatch(cfgs[i]);
            } catch (const Error& e) {
                out[i].doc = {{"command", cfgs[i].command}, {"error", e.what()}, {"pass", false}};
                out[i].pass = false;
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

}  // namespace hardylab::cli
