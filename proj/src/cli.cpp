#include "nullctl/cli.hpp"

#include "nullctl/biortho_time.hpp"
#include "nullctl/error.hpp"
#include "nullctl/grushin.hpp"
#include "nullctl/hautus.hpp"
#include "nullctl/models.hpp"
#include "nullctl/spectral.hpp"
#include "nullctl/synthesis.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace nullctl {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_real(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

constexpr double pi = std::numbers::pi;

const std::set<std::string> commands = {"indices",   "hypotheses", "tstar",   "biortho",
                                        "synthesize", "verify",     "grushin", "gramian2x2"};

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object())
        bad(where + " must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            bad("unknown key '" + key + "' in " + where);
}

double real_at(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key))
        bad(where + " needs '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number())
        bad(where + "." + key + " must be a number");
    return v.get<double>();
}

double real_or(const json& obj, const std::string& key, double fallback, const std::string& where)
{
    return obj.contains(key) ? real_at(obj, key, where) : fallback;
}

long integer_or(const json& obj, const std::string& key, long fallback, const std::string& where)
{
    if (!obj.contains(key))
        return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        bad(where + "." + key + " must be an integer");
    return v.get<long>();
}

std::size_t count_or(const json& obj, const std::string& key, long fallback, const std::string& where)
{
    const long v = integer_or(obj, key, fallback, where);
    if (v < 1)
        bad(where + "." + key + " must be positive");
    return std::size_t(v);
}

std::vector<double> reals(const json& v, const std::string& where)
{
    if (!v.is_array())
        bad(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number())
            bad(where + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// --- models ---------------------------------------------------------------

// model name -> parameter keys ("M" and "scale" optional)
const std::map<std::string, std::set<std::string>>& model_table()
{
    static const std::map<std::string, std::set<std::string>> t = {
        {"pointwise_heat", {"x0"}},
        {"two_diffusion_boundary", {"d"}},
        {"two_diffusion_pointwise", {"d", "x0"}},
        {"academic_lf", {"tau"}},
        {"harmonic_oscillator", {}},
        {"cascade_internal", {"q", "a", "b", "M"}},
        {"cascade_boundary", {"q", "M"}},
        {"two_diffusion", {"d", "scale"}},
        {"appendix_b", {"tau"}},
        {"power", {"c", "p"}},
        {"finite", {"eigenvalues"}},
    };
    return t;
}

PiecewiseConstant coupling(const json& q)
{
    only_keys(q, {"breaks", "values"}, "model.q");
    if (!q.contains("breaks") || !q.contains("values"))
        bad("model.q needs 'breaks' and 'values'");
    try {
        return PiecewiseConstant::make(reals(q.at("breaks"), "model.q.breaks"), reals(q.at("values"), "model.q.values"));
    } catch (const Error& e) {
        bad(std::string("model.q: ") + e.what());
    }
}

struct ModelSpec {
    std::string name;
    std::optional<ParabolicModel> model;
    SpectralSequence seq;
};

void validate_model(const json& m)
{
    if (!m.is_object() || !m.contains("name") || !m.at("name").is_string())
        bad("model must be an object with a string 'name'");
    const auto name = m.at("name").get<std::string>();
    auto it = model_table().find(name);
    if (it == model_table().end())
        bad("unknown model '" + name + "'");
    auto allowed = it->second;
    allowed.insert("name");
    only_keys(m, allowed, "model");
    for (const auto& key : it->second) {
        if (key == "M" || key == "scale")
            continue;
        if (!m.contains(key))
            bad("model " + name + " needs '" + key + "'");
    }
    if (m.contains("M") && !m.at("M").is_number_integer())
        bad("model.M must be an integer");
    if (m.contains("q"))
        coupling(m.at("q"));
    if (m.contains("eigenvalues")) {
        const auto& ev = m.at("eigenvalues");
        if (!ev.is_array() || ev.empty())
            bad("model.eigenvalues must be a non-empty array");
        for (const auto& e : ev)
            if (!(e.is_number() || (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())))
                bad("model.eigenvalues entries are numbers or [re, im] pairs");
    }
    for (const char* key : {"x0", "d", "tau", "a", "b", "c", "p", "scale"})
        if (m.contains(key) && !m.at(key).is_number())
            bad(std::string("model.") + key + " must be a number");
}

ModelSpec make_model(const json& m)
{
    ModelSpec s;
    s.name = m.at("name").get<std::string>();
    const std::string w = "model";
    auto M = [&] { return integer_or(m, "M", default_psi_modes, w); };
    if (s.name == "pointwise_heat")
        s.model = pointwise_heat(real_at(m, "x0", w));
    else if (s.name == "two_diffusion_boundary")
        s.model = two_diffusion_boundary(real_at(m, "d", w));
    else if (s.name == "two_diffusion_pointwise")
        s.model = two_diffusion_pointwise(real_at(m, "d", w), real_at(m, "x0", w));
    else if (s.name == "academic_lf")
        s.model = academic_lf(real_at(m, "tau", w));
    else if (s.name == "harmonic_oscillator")
        s.model = harmonic_oscillator();
    else if (s.name == "cascade_internal")
        s.model = cascade_internal_q(coupling(m.at("q")), real_at(m, "a", w), real_at(m, "b", w), M());
    else if (s.name == "cascade_boundary")
        s.model = cascade_boundary_q(coupling(m.at("q")), M());
    else if (s.name == "two_diffusion")
        s.seq = SpectralSequence::generated(two_diffusion_rule(real_at(m, "d", w), real_or(m, "scale", pi * pi, w)));
    else if (s.name == "appendix_b")
        s.seq = SpectralSequence::generated(appendix_b_rule(real_at(m, "tau", w)));
    else if (s.name == "power")
        s.seq = SpectralSequence::generated(power_rule(real_at(m, "c", w), real_at(m, "p", w)));
    else if (s.name == "finite") {
        std::vector<RawEigenvalue> raw;
        for (const auto& e : m.at("eigenvalues"))
            raw.push_back({e.is_number() ? cplx(e.get<double>()) : cplx(e[0].get<double>(), e[1].get<double>())});
        s.seq = normal_order(raw);
    }
    if (s.model)
        s.seq = s.model->spectrum();
    return s;
}

const ParabolicModel& need_modes(const ModelSpec& s, const std::string& command)
{
    if (!s.model)
        bad("command '" + command + "' needs a model with eigenfunction data; '" + s.name + "' is spectrum-only");
    return *s.model;
}

InitialData initial_data(const json& cfg)
{
    if (!cfg.contains("initial"))
        return [](long k, int) { return cplx(1.0 / double(k)); };
    const auto& in = cfg.at("initial");
    if (!in.is_object() || !in.contains("kind") || !in.at("kind").is_string())
        bad("initial must be an object with a string 'kind'");
    const auto kind = in.at("kind").get<std::string>();
    if (kind == "inverse_power") {
        only_keys(in, {"kind", "p", "branches"}, "initial");
        const double p = real_or(in, "p", 1, "initial");
        std::vector<double> br = in.contains("branches") ? reals(in.at("branches"), "initial.branches")
                                                         : std::vector<double>{};
        return [p, br](long k, int i) {
            const double w = std::size_t(i) < br.size() ? br[std::size_t(i)] : (br.empty() ? 1.0 : 0.0);
            return cplx(w * std::pow(double(k), -p));
        };
    }
    if (kind == "unit") {
        only_keys(in, {"kind", "k", "branch"}, "initial");
        const long k0 = integer_or(in, "k", 1, "initial");
        const long b0 = integer_or(in, "branch", 0, "initial");
        return [k0, b0](long k, int i) { return cplx(k == k0 && i == b0 ? 1.0 : 0.0); };
    }
    if (kind == "list") {
        only_keys(in, {"kind", "coeffs"}, "initial");
        if (!in.contains("coeffs") || !in.at("coeffs").is_array())
            bad("initial.coeffs must be an array of per-mode branch arrays");
        std::vector<std::vector<double>> c;
        for (const auto& row : in.at("coeffs"))
            c.push_back(row.is_number() ? std::vector<double>{row.get<double>()} : reals(row, "initial.coeffs[]"));
        return [c](long k, int i) {
            if (k < 1 || std::size_t(k) > c.size() || std::size_t(i) >= c[std::size_t(k - 1)].size())
                return cplx(0);
            return cplx(c[std::size_t(k - 1)][std::size_t(i)]);
        };
    }
    bad("unknown initial.kind '" + kind + "'");
}

// --- output ---------------------------------------------------------------

class Writer {
public:
    Writer(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void text(const std::string& name, const std::string& body)
    {
        std::ofstream f(dir_ / name, std::ios::binary);
        f << body;
        if (!f)
            throw Error(ErrorCode::InvalidConfig, "cannot write " + (dir_ / name).string());
        written_.push_back(dir_ / name);
    }
    void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }
    void table(const std::string& name, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows)
    {
        std::string s;
        for (std::size_t i = 0; i < header.size(); ++i)
            s += (i ? "," : "") + header[i];
        s += "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i)
                s += (i ? "," : "") + r[i];
            s += "\n";
        }
        text(name, s);
    }
    // gnuplot two-column file
    void dat(const std::string& name, const std::string& comment, const std::vector<double>& x,
             const std::vector<double>& y)
    {
        std::string s = "# " + comment + "\n";
        for (std::size_t i = 0; i < x.size(); ++i)
            s += format_real(x[i]) + " " + format_real(y[i]) + "\n";
        text(name, s);
    }
    const std::vector<fs::path>& written() const { return written_; }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

// JSON has no inf/nan; spell them as strings.
json num(double x)
{
    if (std::isfinite(x))
        return x;
    return format_real(x);
}

json nums(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v)
        a.push_back(num(x));
    return a;
}

json profile_json(const ProfileReport& p)
{
    return {{"size", p.size()},
            {"tail_estimate", num(p.tail_estimate)},
            {"window", p.window},
            {"unbounded", p.unbounded},
            {"notes", p.notes}};
}

std::vector<std::vector<std::string>> profile_rows(const ProfileReport& p, const std::string& label)
{
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<std::string> r;
        if (!label.empty())
            r.push_back(label);
        r.push_back(std::to_string(p.k[i]));
        r.push_back(p.re_lambda.size() > i ? format_real(p.re_lambda[i]) : "nan");
        r.push_back(format_real(p.value[i]));
        r.push_back(format_real(p.running_sup[i]));
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<double> as_double(const std::vector<long>& v) { return {v.begin(), v.end()}; }

json header(const json& cfg, const RunOptions& opt, Precision prec)
{
    return {{"command", cfg.at("command")},
            {"model", cfg.contains("model") ? cfg.at("model") : json(nullptr)},
            {"precision", prec == Precision::Extended ? "extended" : "standard"},
            {"seed", opt.seed}};
}

std::string kind_name(ModeKind k)
{
    switch (k) {
    case ModeKind::Simple: return "simple";
    case ModeKind::Multiple: return "multiple";
    case ModeKind::Jordan2: return "jordan2";
    }
    return "simple";
}

// --- commands -------------------------------------------------------------

struct Ctx {
    const json& cfg;
    const RunOptions& opt;
    Precision prec;
    Writer& out;
    json head;
};

std::size_t K_of(const Ctx& c) { return count_or(c.cfg, "K", 30, "config"); }
int window_of(const Ctx& c) { return int(count_or(c.cfg, "window", default_window, "config")); }
double tol_of(const Ctx& c) { return real_or(c.cfg, "rel_tail_tol", default_rel_tail_tol, "config"); }
double T_of(const Ctx& c)
{
    const double T = real_at(c.cfg, "T", "config");
    if (!(T > 0))
        bad("config.T must be positive");
    return T;
}

void cmd_indices(Ctx& c, const ModelSpec& m)
{
    const auto K = K_of(c);
    const int W = window_of(c);
    auto cond = condensation_profile(m.seq, K, tol_of(c), W);
    auto bohr = bohr_profile(m.seq, K, W);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < std::min(cond.size(), bohr.size()); ++i)
        rows.push_back({std::to_string(cond.k[i]), format_real(cond.re_lambda[i]), format_real(cond.value[i]),
                        format_real(cond.running_sup[i]), format_real(bohr.value[i]),
                        format_real(bohr.running_sup[i])});
    c.out.table("indices.csv", {"k", "ReLambda", "cond_v", "cond_runsup", "bohr_v", "bohr_runsup"}, rows);
    c.out.dat("condensation.dat", "k cond_v", as_double(cond.k), cond.value);
    c.out.dat("bohr.dat", "k bohr_v", as_double(bohr.k), bohr.value);
    json j = c.head;
    j["K"] = K;
    j["condensation"] = profile_json(cond);
    j["bohr"] = profile_json(bohr);
    std::vector<long> partner = bohr.partner;
    j["bohr"]["partner"] = partner;
    c.out.json_file("indices.json", j);
}

void cmd_hypotheses(Ctx& c, const ModelSpec& m)
{
    const auto K = K_of(c);
    auto r = check_hypotheses(m.seq, K, real_or(c.cfg, "fit_tol", default_fit_tol, "config"));
    json j = c.head;
    j["K"] = K;
    j["sector_delta_est"] = num(r.sector_delta_est);
    j["summability_exponent"] = num(r.summability_exponent);
    j["summable"] = r.summable;
    j["sup_rk"] = r.sup_rk;
    j["warnings"] = r.warnings;
    c.out.json_file("hypotheses.json", j);
}

void cmd_tstar(Ctx& c, const ModelSpec& m)
{
    const auto& model = need_modes(m, "tstar");
    const auto K = K_of(c);
    const int W = window_of(c);
    auto est = tstar_estimate(model, K, W);

    // component profiles, where they apply
    std::vector<std::pair<std::string, ProfileReport>> profiles;
    auto attempt = [&](const std::string& name, const std::function<ProfileReport()>& f) {
        try {
            profiles.emplace_back(name, f());
        } catch (const Error&) {
        }
    };
    attempt("observation", [&] { return tstar_observation_profile(model, K, W); });
    attempt("gap", [&] { return tstar_gap_profile(model, K, W); });
    try {
        auto jp = tstar_jordan_profile(model, K, W);
        profiles.emplace_back("jordan_mu", jp.mu);
        if (jp.gamma.size())
            profiles.emplace_back("jordan_gamma", jp.gamma);
    } catch (const Error&) {
    }
    std::vector<std::vector<std::string>> rows;
    json comps = json::object();
    for (const auto& [name, p] : profiles) {
        auto r = profile_rows(p, name);
        rows.insert(rows.end(), r.begin(), r.end());
        c.out.dat("tstar_" + name + ".dat", "k value", as_double(p.k), p.value);
        comps[name] = profile_json(p);
    }
    c.out.table("tstar.csv", {"component", "k", "ReLambda", "value", "running_sup"}, rows);
    json j = c.head;
    j["K"] = K;
    j["tstar_lower"] = num(est.lower);
    json tails = json::object();
    for (const auto& [k, v] : est.components)
        tails[k] = num(v);
    j["components"] = tails;
    j["profiles"] = comps;
    j["notes"] = est.notes;
    if (model.tmin) {
        auto tm = model.tmin->profile(K, W);
        j["tmin"] = {{"description", model.tmin->description}, {"tail_estimate", num(tm.tail_estimate)}};
    }
    c.out.json_file("tstar.json", j);
}

void cmd_biortho(Ctx& c, const ModelSpec& m)
{
    const auto N = count_or(c.cfg, "N", 10, "config");
    std::optional<double> T;
    const auto& tv = c.cfg.contains("T") ? c.cfg.at("T") : json("inf");
    if (tv.is_string() && tv.get<std::string>() == "inf")
        T.reset();
    else
        T = T_of(c);
    const bool jordan = c.cfg.value("jordan", false);
    auto entries = m.seq.entries(N);
    if (entries->size() < N)
        throw Error(ErrorCode::TooFewModes, "spectrum has fewer than " + std::to_string(N) + " entries");
    std::vector<xcomplex> rates;
    for (std::size_t i = 0; i < N; ++i)
        rates.push_back(extended_rate((*entries)[i]));
    auto span = ExponentialSpan::from_extended(rates, T, jordan);
    auto fam = jordan ? build_biortho_jordan(span, c.prec) : build_biortho(span, c.prec);
    auto basis = span.basis();
    std::vector<std::vector<std::string>> rows;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto l = to_std(span.rates[basis[i].rate]);
        rows.push_back({std::to_string(basis[i].rate + 1), std::to_string(basis[i].power), format_real(l.real()),
                        format_real(l.imag()), format_real(fam.norms[i])});
        x.push_back(l.real());
        y.push_back(std::log(fam.norms[i]));
    }
    c.out.table("biortho.csv", {"k", "power", "ReLambda", "ImLambda", "norm"}, rows);
    c.out.dat("biortho_norms.dat", "ReLambda ln_norm", x, y);
    json j = c.head;
    j["N"] = N;
    j["T"] = T ? json(*T) : json("inf");
    j["jordan"] = jordan;
    j["residual"] = num(fam.residual);
    j["cond_estimate"] = num(fam.cond_estimate);
    j["norm_consistency"] = num(fam.norm_consistency);
    j["degraded"] = fam.degraded;
    j["norms"] = nums(fam.norms);
    if (c.cfg.contains("c_est")) {
        auto fit = norm_growth_fit(fam, real_at(c.cfg, "c_est", "config"), window_of(c));
        j["norm_growth"] = {{"slope", num(fit.slope)},     {"bound", num(fit.bound)},
                            {"slack", num(fit.slack)},     {"consistent", fit.consistent},
                            {"degenerate", fit.degenerate}, {"points", fit.points}};
    }
    c.out.json_file("biortho.json", j);
}

json plan_json(const ControlPlan& plan)
{
    json modes = json::array();
    for (std::size_t k = 0; k < plan.N(); ++k) {
        const auto l = plan.modes[k].lambda.value();
        modes.push_back({{"k", plan.modes[k].k},
                         {"ReLambda", num(l.real())},
                         {"ImLambda", num(l.imag())},
                         {"kind", kind_name(plan.modes[k].kind)},
                         {"per_mode_norm", num(plan.per_mode_norm[k])},
                         {"spatial_sigma", num(plan.spatial_sigma[k])},
                         {"spatial_bound", num(plan.spatial_bound[k])},
                         {"spatial_max_norm", num(plan.spatial_max_norm[k])}});
    }
    return {{"T", plan.T},
            {"N", plan.N()},
            {"engine", plan.name},
            {"terms", plan.terms.size()},
            {"total_norm", num(plan.total_norm)},
            {"triangle_bound", num(plan.triangle_bound)},
            {"solver_residual", num(plan.solver_residual)},
            {"family_cond_estimate", num(plan.family->cond_estimate)},
            {"modes", modes}};
}

json residual_json(const MomentResidualReport& rep)
{
    json res = json::array();
    for (const auto& r : rep.residuals)
        res.push_back({{"k", r.k}, {"branch", r.branch}, {"re", num(r.value.real())}, {"im", num(r.value.imag())}});
    return {{"max_abs", num(rep.max_abs)},
            {"max_abs_beyond", num(rep.max_abs_beyond)},
            {"tail_bound", num(rep.tail_bound)},
            {"residuals", res}};
}

void write_control(Ctx& c, const ControlPlan& plan)
{
    const auto samples = count_or(c.cfg, "samples", 2000, "config");
    const std::size_t n = std::max<std::size_t>(samples, 2);
    std::vector<double> t(n);
    auto u = plan.sample_uniform(n);
    const std::size_t width = u[0].size();
    for (std::size_t i = 0; i < n; ++i)
        t[i] = plan.T * double(i) / double(n - 1);
    const bool scalar = plan.terms.empty() ||
                        plan.terms[0].direction.kind() == ObservationVector::Kind::Scalar;
    std::vector<std::string> head{"t"};
    if (scalar) {
        head.insert(head.end(), {"u_re", "u_im"});
    } else {
        for (std::size_t m = 1; m <= width; ++m) {
            head.push_back("c" + std::to_string(m) + "_re");
            head.push_back("c" + std::to_string(m) + "_im");
        }
    }
    std::vector<std::vector<std::string>> rows;
    std::vector<double> dat(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> r{format_real(t[i])};
        for (auto z : u[i]) {
            r.push_back(format_real(z.real()));
            r.push_back(format_real(z.imag()));
        }
        rows.push_back(std::move(r));
        if (scalar)
            dat[i] = u[i][0].real();
        else {
            // ||u(t)|| in U from its sine coefficients on omega
            std::vector<cplx> cf = u[i];
            const auto [a, b] = plan.terms[0].direction.interval();
            auto ov = ObservationVector::sine_series(cf, a, b);
            dat[i] = ov.norm();
        }
    }
    c.out.table("control.csv", head, rows);
    c.out.dat("control.dat", scalar ? "t Re_u" : "t norm_u", t, dat);

    std::vector<std::vector<std::string>> pm;
    std::vector<double> x, y;
    for (std::size_t k = 0; k < plan.N(); ++k) {
        const double l = plan.modes[k].lambda.value().real();
        pm.push_back({std::to_string(plan.modes[k].k), format_real(l), kind_name(plan.modes[k].kind),
                      format_real(plan.per_mode_norm[k])});
        x.push_back(l);
        y.push_back(plan.per_mode_norm[k]);
    }
    c.out.table("per_mode.csv", {"k", "ReLambda", "kind", "per_mode_norm"}, pm);
    c.out.dat("per_mode.dat", "ReLambda per_mode_norm", x, y);
}

void cmd_synthesize(Ctx& c, const ModelSpec& m, bool verify_only)
{
    const auto& base = need_modes(m, c.cfg.at("command").get<std::string>());
    auto model = base.with_initial(initial_data(c.cfg));
    const double T = T_of(c);
    const auto N = count_or(c.cfg, "N", 10, "config");
    const auto N_check = count_or(c.cfg, "N_check", long(N), "config");
    auto plan = synthesize(model, T, N, c.prec);
    auto rep = verify_moments(plan, model, T, N_check);
    json j = c.head;
    j["plan"] = plan_json(plan);
    j["verification"] = residual_json(rep);
    j["N_check"] = N_check;
    if (verify_only) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : rep.residuals)
            rows.push_back({std::to_string(r.k), std::to_string(r.branch), format_real(r.value.real()),
                            format_real(r.value.imag()), format_real(std::abs(r.value))});
        c.out.table("residuals.csv", {"k", "branch", "re", "im", "abs"}, rows);
        c.out.json_file("verify.json", j);
        return;
    }
    write_control(c, plan);
    c.out.json_file("residuals.json", j);
}

void cmd_grushin(Ctx& c)
{
    const json g = c.cfg.value("grushin", json::object());
    only_keys(g, {"a", "b", "n_lo", "n_hi", "h"}, "grushin");
    const double a = real_or(g, "a", 0.3, "grushin"), b = real_or(g, "b", 0.5, "grushin");
    const long lo = integer_or(g, "n_lo", 20, "grushin"), hi = integer_or(g, "n_hi", 40, "grushin");
    const double h = real_or(g, "h", default_grushin_h, "grushin");
    if (!(0 <= a && a < b && b <= 1))
        bad("grushin needs 0 <= a < b <= 1");
    if (lo < 1 || hi < lo)
        bad("grushin needs 1 <= n_lo <= n_hi");
    const int W = window_of(c);
    auto prof = grushin_tstar_profile(a, b, lo, hi, h, W);
    std::vector<std::vector<std::string>> rows;
    for (long n = lo; n <= hi; ++n) {
        auto mode = solve_mode(n, h);
        const double li = log_observation_integral(mode, a, b);
        const double model_log = -a * a * double(n) * pi - std::log(2 * a * pi * std::sqrt(double(n)));
        rows.push_back({std::to_string(n), format_real(mode.lambda), format_real(mode.lambda - double(n) * pi),
                        format_real(mode.richardson_rel), format_real(li),
                        a > 0 ? format_real(std::exp(li - model_log)) : "nan", format_real(grushin_tn(mode, a, b))});
    }
    c.out.table("grushin.csv", {"n", "lambda", "lambda_minus_npi", "richardson_rel", "log_integral", "ratio", "T_n"},
                rows);
    c.out.dat("grushin_tn.dat", "n T_n", as_double(prof.k), prof.value);
    json j = c.head;
    j["grushin"] = {{"a", a}, {"b", b}, {"n_lo", lo}, {"n_hi", hi}, {"h", h}};
    j["profile"] = profile_json(prof);
    j["a2_over_2"] = a * a / 2;
    c.out.json_file("grushin.json", j);
}

void cmd_gramian(Ctx& c)
{
    const json blk = c.cfg.value("block", json::object());
    only_keys(blk, {"lambda", "b"}, "block");
    auto pair = [&](const json& obj, const char* key, std::array<double, 2> fallback, const std::string& where) {
        if (!obj.contains(key))
            return fallback;
        auto v = reals(obj.at(key), where + "." + key);
        if (v.size() != 2)
            bad(where + "." + key + " must have two entries");
        return std::array<double, 2>{v[0], v[1]};
    };
    const auto l = pair(blk, "lambda", {1, 2}, "block");
    const auto b = pair(blk, "b", {1, 1}, "block");
    const auto y0 = pair(c.cfg, "y0", {1, 1}, "config");
    const double T = c.cfg.contains("T") ? T_of(c) : 1.0;
    const double h = real_or(c.cfg, "rk4_h", 1e-4, "config");
    if (!(h > 0))
        bad("config.rk4_h must be positive");
    const auto block = Block2x2::make(l[0], l[1], b[0], b[1]);
    auto g = gramian_control_2x2(block, y0, T, count_or(c.cfg, "samples", 2000, "config"));
    auto yT = rk4_terminal(block, g, y0, T, h);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < g.t.size(); ++i)
        rows.push_back({format_real(g.t[i]), format_real(g.u[i])});
    c.out.table("gramian_control.csv", {"t", "u"}, rows);
    c.out.dat("gramian_control.dat", "t u", g.t, g.u);
    json j = c.head;
    j["block"] = {{"lambda", {l[0], l[1]}}, {"b", {b[0], b[1]}}};
    j["T"] = T;
    j["y0"] = {y0[0], y0[1]};
    j["Q"] = {{num(g.Q[0][0]), num(g.Q[0][1])}, {num(g.Q[1][0]), num(g.Q[1][1])}};
    j["det"] = num(g.det);
    j["trace"] = num(g.trace);
    j["sigma"] = num(g.sigma);
    j["sigma_bounds_ok"] = g.sigma_bounds_ok;
    j["z"] = {num(g.z[0]), num(g.z[1])};
    j["control_norm2"] = num(g.norm2);
    j["bound_fit"] = num(g.bound_fit);
    j["rk4"] = {{"h", h}, {"terminal", {num(yT[0]), num(yT[1])}}, {"terminal_norm", num(std::hypot(yT[0], yT[1]))}};
    c.out.json_file("gramian.json", j);
}

const std::set<std::string> top_keys = {"command", "model",  "K",       "N",     "N_check", "T",    "window",
                                        "rel_tail_tol", "fit_tol", "precision", "initial", "samples", "jordan",
                                        "c_est",   "grushin", "block",   "y0",    "rk4_h"};

Precision precision_of(const json& cfg, const RunOptions& opt)
{
    if (opt.precision)
        return *opt.precision;
    if (!cfg.contains("precision"))
        return Precision::Extended;
    return cfg.at("precision").get<std::string>() == "standard" ? Precision::Standard : Precision::Extended;
}

} // namespace

void validate_config(const json& cfg)
{
    only_keys(cfg, top_keys, "config");
    if (!cfg.contains("command") || !cfg.at("command").is_string())
        bad("config needs a string 'command'");
    const auto cmd = cfg.at("command").get<std::string>();
    if (!commands.count(cmd))
        bad("unknown command '" + cmd + "'");
    const bool needs_model = cmd != "grushin" && cmd != "gramian2x2";
    if (needs_model && !cfg.contains("model"))
        bad("command '" + cmd + "' needs a model");
    if (cfg.contains("model"))
        validate_model(cfg.at("model"));
    if (cfg.contains("precision")) {
        const auto& p = cfg.at("precision");
        if (!p.is_string() || (p != "standard" && p != "extended"))
            bad("precision must be 'standard' or 'extended'");
    }
    for (const char* key : {"K", "N", "N_check", "window", "samples"})
        if (cfg.contains(key))
            count_or(cfg, key, 1, "config");
    for (const char* key : {"rel_tail_tol", "fit_tol", "c_est", "rk4_h"})
        if (cfg.contains(key))
            real_at(cfg, key, "config");
    if (cfg.contains("T") && !cfg.at("T").is_number() && cfg.at("T") != "inf")
        bad("config.T must be a number (or \"inf\" for biortho)");
    if (cfg.contains("T") && cfg.at("T").is_string() && cmd != "biortho")
        bad("T = inf is only meaningful for biortho");
    if (cfg.contains("jordan") && !cfg.at("jordan").is_boolean())
        bad("config.jordan must be a boolean");
    if (cfg.contains("initial"))
        initial_data(cfg);
    if (cfg.contains("grushin"))
        only_keys(cfg.at("grushin"), {"a", "b", "n_lo", "n_hi", "h"}, "grushin");
    if (cfg.contains("block"))
        only_keys(cfg.at("block"), {"lambda", "b"}, "block");
    if ((cmd == "synthesize" || cmd == "verify") && !cfg.contains("T"))
        bad("command '" + cmd + "' needs T");
}

std::vector<fs::path> run(const json& cfg, const RunOptions& opt)
{
    validate_config(cfg);
    const auto cmd = cfg.at("command").get<std::string>();
    const Precision prec = precision_of(cfg, opt);
    Writer out(opt.out);
    Ctx c{cfg, opt, prec, out, header(cfg, opt, prec)};
    if (cmd == "grushin") {
        cmd_grushin(c);
        return out.written();
    }
    if (cmd == "gramian2x2") {
        cmd_gramian(c);
        return out.written();
    }
    const auto spec = make_model(cfg.at("model"));
    if (spec.model) {
        c.head["model_notes"] = spec.model->notes;
        c.head["model_warnings"] = spec.model->warnings;
    }
    if (cmd == "indices")
        cmd_indices(c, spec);
    else if (cmd == "hypotheses")
        cmd_hypotheses(c, spec);
    else if (cmd == "tstar")
        cmd_tstar(c, spec);
    else if (cmd == "biortho")
        cmd_biortho(c, spec);
    else if (cmd == "synthesize")
        cmd_synthesize(c, spec, false);
    else if (cmd == "verify")
        cmd_synthesize(c, spec, true);
    return out.written();
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    auto report = [&](const std::string& code, const std::string& msg, int exit_code) {
        err << json{{"error", code}, {"message", msg}, {"exit_code", exit_code}}.dump() << "\n";
        return exit_code;
    };

    CLI::App app{"nullctl: moment-method null controllability toolkit"};
    std::string config_path, out_dir = ".", precision;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "run config (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--precision", precision, "standard or extended")->check(CLI::IsMember({"standard", "extended"}));
    app.add_option("--seed", seed, "seed recorded with property fixtures");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        return report("INVALID_CONFIG", e.what(), 2);
    }

    RunOptions opt;
    opt.out = out_dir;
    opt.seed = seed;
    if (!precision.empty())
        opt.precision = precision == "standard" ? Precision::Standard : Precision::Extended;

    try {
        std::ifstream f(config_path);
        if (!f)
            return report("INVALID_CONFIG", "cannot read " + config_path, 2);
        json cfg;
        try {
            cfg = json::parse(f);
        } catch (const json::exception& e) {
            return report("INVALID_CONFIG", e.what(), 2);
        }
        auto files = run(cfg, opt);
        for (const auto& p : files)
            out << p.string() << "\n";
        return 0;
    } catch (const Error& e) {
        return report(std::string(error_name(e.code())), e.what(), is_numerical(e.code()) ? 3 : 2);
    } catch (const json::exception& e) {
        return report("INVALID_CONFIG", e.what(), 2);
    } catch (const std::exception& e) {
        return report("INTERNAL_ERROR", e.what(), 3);
    }
}

} // namespace nullctl
