// stieltjesk: command-line front end.
//
// Exit codes: 0 every check passed, 1 a check failed (or was inconclusive),
// 2 usage error (bad flags, out-of-range parameters, unparsable input).

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stieltjesk/json_io.hpp"
#include "stieltjesk/stieltjesk.hpp"

using namespace stieltjesk;

namespace {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Options {
    int k = 2;
    std::optional<std::string> alpha;
    std::optional<std::string> u;
    std::vector<std::string> x;
    std::string t = "1";
    std::optional<double> grid_min, grid_max;
    std::optional<int> grid_points;
    std::optional<double> tol;
    int precision_bits = 53;
    std::uint64_t seed = 7;
    std::string format = "csv";
    std::string out;

    // verb-specific
    std::string f;
    std::string measure;
    std::string drift = "0";
    int derivative = 0;
    std::string route = "direct";
    std::optional<double> w_max;
    std::optional<int> w_points;
    std::string p = "1";
    std::vector<std::string> ps;
    std::vector<double> lambdas;
    std::optional<int> n;
    int n_max = 5;
    int trials = 10;
    int k_max = 20;
    std::optional<std::string> alpha_min, alpha_max;
    std::string alpha_step = "1/100";
    int steps = 7;
    std::string suite = "all";
    std::string name;
    bool k_given = false;
};

// ---------------------------------------------------------------------------
// Output

class Output {
public:
    Output(const Options& o) : opts_(o) {
        if (!o.out.empty()) {
            file_.open(o.out);
            if (!file_) throw UsageError("cannot open output file '" + o.out + "'");
        }
        digits_ = static_cast<int>(std::ceil(o.precision_bits * std::log10(2.0))) + 1;
    }

    std::ostream& os() { return opts_.out.empty() ? std::cout : file_; }
    bool json() const { return opts_.format == "json"; }

    std::string num(double v) const {
        if (std::isnan(v)) return "nan";
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        std::ostringstream s;
        s << std::setprecision(digits_) << v;
        return s.str();
    }
    std::string num(const HighReal& v) const {
        if (digits_ <= 17) return num(static_cast<double>(v));
        std::ostringstream s;
        s << std::setprecision(digits_) << v;
        return s.str();
    }

    void comment(const std::string& key, const std::string& value) {
        meta_[key] = value;
        if (!json()) os() << "# " << key << ": " << value << "\n";
    }
    void header(const std::vector<std::string>& cols) {
        cols_ = cols;
        if (!json()) row(cols);
    }
    void row(const std::vector<std::string>& cells) {
        if (json()) {
            Json r;
            for (std::size_t i = 0; i < cells.size() && i < cols_.size(); ++i) r[cols_[i]] = cells[i];
            rows_.push_back(r);
            return;
        }
        for (std::size_t i = 0; i < cells.size(); ++i) os() << (i ? "," : "") << csv_cell(cells[i]);
        os() << "\n";
    }
    /// Appends a structured document (json) or nothing (csv has already been written).
    void finish(int status, Json extra = Json()) {
        if (!json()) {
            os() << "# status: " << (status == 0 ? "pass" : "fail") << "\n";
            return;
        }
        Json j;
        j["schema"] = kJsonSchema;
        for (const auto& [key, value] : meta_.items()) j[key] = value;
        if (!rows_.empty()) j["rows"] = rows_;
        if (!extra.is_null())
            for (const auto& [key, value] : extra.items()) j[key] = value;
        j["status"] = status == 0 ? "pass" : "fail";
        os() << j.dump(2) << "\n";
    }

private:
    static std::string csv_cell(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }

    const Options& opts_;
    std::ofstream file_;
    int digits_ = 17;
    Json meta_ = Json::object();
    Json rows_ = Json::array();
    std::vector<std::string> cols_;
};

// ---------------------------------------------------------------------------
// Argument helpers

Rational rational_arg(const std::string& s, const char* what) {
    try {
        return parse_rational(s);
    } catch (const std::exception& e) {
        throw UsageError(std::string(what) + ": " + e.what());
    }
}

Model model_arg(const std::string& s) {
    if (s.empty()) throw UsageError("--f is required");
    try {
        return parse_model(s);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--f: ") + e.what());
    }
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
}

void require_k(int k, int lo, int hi) {
    require(k >= lo && k <= hi, "--k must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

Rational alpha_arg(const Options& o, const Rational& fallback, bool open_unit = true) {
    const Rational a = o.alpha ? rational_arg(*o.alpha, "--alpha") : fallback;
    if (open_unit) require(a > 0 && a < 1, "--alpha must lie in (0, 1)");
    return a;
}

std::vector<double> real_list(const std::vector<std::string>& xs, const std::vector<double>& fallback, const char* what) {
    if (xs.empty()) return fallback;
    std::vector<double> out;
    for (const auto& s : xs) out.push_back(to_real<double>(rational_arg(s, what)));
    return out;
}

GridConfig x_grid(const Options& o) {
    GridConfig g;
    if (o.grid_min) g.x_min = *o.grid_min;
    if (o.grid_max) g.x_max = *o.grid_max;
    if (o.grid_points) g.points = *o.grid_points;
    if (o.tol) g.sign_tolerance = *o.tol;
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return g;
}

HyperbolicGrid w_grid(const Options& o) {
    HyperbolicGrid g;
    if (o.grid_min) g.u_min = *o.grid_min;
    if (o.grid_max) g.u_max = *o.grid_max;
    if (o.grid_points) g.u_points = *o.grid_points;
    if (o.w_max) g.w_max = *o.w_max;
    if (o.w_points) g.w_points = *o.w_points;
    if (o.tol) g.sign_tolerance = *o.tol;
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return g;
}

std::string verdict_name(Verdict v) { return to_string(v); }

// ---------------------------------------------------------------------------
// Verbs

int run_kernel(const Options& o) {
    require_k(o.k, 0, 200);
    require(o.derivative >= 0, "--derivative must be nonnegative");
    Output out(o);
    const Rational t = rational_arg(o.t, "--t");
    require(t >= 0, "--t must be nonnegative");
    out.comment("quantity", o.derivative == 0 ? "Phi_k(x,t)" : "d^i/dx^i Phi_k(x,t), i = " + std::to_string(o.derivative));
    out.comment("arithmetic", "exact rational");
    out.comment("P_k", RationalFn(build_kernel_family(o.k).P).str("z"));
    out.header({"k", "x", "t", "derivative", "value", "decimal"});
    const std::vector<std::string> xs = o.x.empty() ? std::vector<std::string>{"1"} : o.x;
    for (const auto& xs_i : xs) {
        const Rational x = rational_arg(xs_i, "--x");
        require(x > 0, "--x must be positive");
        const Rational v = o.derivative == 0 ? eval_Phi(o.k, x, t) : eval_Phi_x_derivative(o.k, o.derivative, x, t);
        out.row({std::to_string(o.k), to_string(x), to_string(t), std::to_string(o.derivative), to_string(v),
                 out.num(to_real<double>(v))});
    }
    out.finish(0);
    return 0;
}

MeasureSpec measure_arg(const std::string& s) {
    require(!s.empty(), "--measure is required (JSON text or a path to a JSON file)");
    std::string text = s;
    if (s.find('{') == std::string::npos) {
        std::ifstream in(s);
        if (!in) throw UsageError("cannot read measure file '" + s + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return measure_from_json_text(text);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--measure: ") + e.what());
    }
}

int run_transform(const Options& o) {
    require_k(o.k, 2, 60);
    const MeasureSpec mu = measure_arg(o.measure);
    const Rational drift = rational_arg(o.drift, "--drift");
    require(drift >= 0, "--drift must be nonnegative");
    TransformResult fwd;
    try {
        fwd = forward_transform(o.k, drift, mu);
    } catch (const InvalidMeasure& e) {
        throw UsageError(e.what());
    }
    std::vector<double> xs = real_list(o.x, {}, "--x");
    if (xs.empty()) {
        GridConfig g = x_grid(o);
        if (!o.grid_min) g.x_min = 1e-2;
        if (!o.grid_max) g.x_max = 1e2;
        if (!o.grid_points) g.points = 9;
        xs = g.nodes();
    }
    Output out(o);
    out.comment("quantity", "f(x) = drift + int Phi_{k-1}(x,t) mu(dt)");
    out.comment("k", std::to_string(o.k));
    out.comment("drift", to_string(drift));
    out.comment("measure", to_json(mu).dump());
    out.comment("method", fwd.exact_form ? "exact closed form + adaptive quadrature" : "adaptive quadrature");
    out.header({"x", "f", "quad_error", "exact_form"});
    int status = 0;
    for (double x : xs) {
        require(x > 0, "--x must be positive");
        const auto q = fwd.evaluate(x);
        if (!q.converged) status = 1;
        out.row({out.num(x), out.num(q.value), out.num(q.error), fwd.exact_form ? out.num(fwd.exact_form->eval(x)) : ""});
    }
    out.finish(status);
    return status;
}

std::string limit_cell(const LimitValue& v, const Output& out) { return v.exact ? to_string(*v.exact) : out.num(v.value); }

int run_invert(const Options& o) {
    require_k(o.k, 2, 60);
    const Model f = model_arg(o.f);
    InvertOptions io;
    io.throw_on_negative = false;
    const GridConfig g = x_grid(o);
    io.grid_min = g.x_min;
    io.grid_max = g.x_max;
    io.grid_points = o.grid_points ? g.points : io.grid_points;
    if (o.tol) io.tolerance = *o.tol;
    const InversionResult r = invert(f, o.k, io);
    const int status = r.negative_witness ? 1 : 0;
    Output out(o);
    if (out.json()) {
        Json j = to_json(r);
        j["f"] = to_string(f);
        j["status"] = status == 0 ? "pass" : "fail";
        out.os() << j.dump(2) << "\n";
        return status;
    }
    out.comment("quantity", "measure mu with f = drift + int Phi_{k-1}(x,t) mu(dt)");
    out.comment("f", to_string(f));
    out.comment("k", std::to_string(o.k));
    out.comment("density grid", "[" + out.num(io.grid_min) + ", " + out.num(io.grid_max) + "], " +
                                    std::to_string(io.grid_points) + " points, tol " + out.num(io.tolerance));
    out.header({"quantity", "value", "uncertainty", "method"});
    out.row({"drift", limit_cell(r.drift, out), out.num(r.drift.uncertainty), r.drift.method});
    out.row({"atom_at_zero", limit_cell(r.atom_at_zero, out), out.num(r.atom_at_zero.uncertainty), r.atom_at_zero.method});
    out.row({"b_k", limit_cell(r.b_k, out), out.num(r.b_k.uncertainty), r.b_k.method});
    out.row({"density", to_string(r.density), "", r.exact ? "exact" : "symbolic"});
    for (const auto& a : r.atoms) out.row({"atom@" + to_string(a.location), to_string(a.mass), "0", "exact"});
    if (r.negative_witness)
        out.comment("not in S_k", "density negative at t = " + out.num(r.negative_witness->first) + " (value " +
                                       out.num(r.negative_witness->second) + ")");
    out.finish(status);
    return status;
}

int report_membership(const Options& o, Output& out, const MembershipReport& r, const std::string& f) {
    const int status = r.passed() ? 0 : 1;
    if (out.json()) {
        Json j = to_json(r);
        j["f"] = f;
        out.os() << j.dump(2) << "\n";
        return status;
    }
    out.comment("test", r.test);
    out.comment("f", f);
    out.comment("k", std::to_string(r.k));
    out.comment("grid", r.grid);
    out.comment("verdict bands", "pass: margin >= -eps; fail: consistent witness < -" + out.num(kFailFactor) + " eps");
    out.header({"order", "condition", "verdict", "worst_margin", "location", "u", "method"});
    for (const auto& v : r.orders)
        out.row({std::to_string(v.order), v.condition, verdict_name(v.verdict), out.num(v.worst_margin), out.num(v.location),
                 v.u ? out.num(*v.u) : "", v.method});
    out.comment("verdict", verdict_name(r.verdict));
    out.comment("method", r.method);
    out.comment("worst", "margin " + out.num(r.worst_margin) + " at " + out.num(r.location) + (r.u ? " (u = " + out.num(*r.u) + ")" : ""));
    (void)o;
    out.finish(status);
    return status;
}

int run_test(const Options& o, const std::string& verb) {
    require_k(o.k, 1, 12);
    const Model f = model_arg(o.f);
    Output out(o);
    MembershipReport r;
    if (verb == "test-sk") {
        r = check_Sk(f, o.k, x_grid(o));
    } else if (verb == "test-hmk") {
        r = check_HMk(f, o.k, w_grid(o));
    } else if (verb == "test-hmk-hat") {
        require(o.route == "direct" || o.route == "delta", "--route must be direct or delta");
        r = o.route == "direct" ? check_HMk_hat(f, o.k, x_grid(o)) : check_delta_route(f, o.k, w_grid(o));
    } else {
        // test-mk: f is read as a function of w on (2, inf).
        WFunction h;
        h.max_order = std::max(o.k - 1, 0);
        h.eval = [f](const HighReal& w, int j) { return evaluate(f, Jet<HighReal>::variable(j, w)).derivative(j); };
        if (auto rat = as_rational(f)) {
            const RationalFn w_of_v(QPoly{Rational(1), Rational(0), Rational(1)}, QPoly::x());
            h.exact = HyperbolicFn(rat->compose(w_of_v));
        }
        r = check_Mk(h, o.k, w_grid(o));
    }
    return report_membership(o, out, r, to_string(f));
}

int run_delta(const Options& o) {
    require_k(o.k, 1, 40);
    const Rational u = rational_arg(o.u.value_or("1"), "--u");
    require(u > 0, "--u must be positive");
    const double w_lo = o.grid_min.value_or(2.1), w_hi = o.grid_max.value_or(10);
    const int n = o.grid_points.value_or(80);
    require(w_lo > 2 && w_lo < w_hi && n >= 2, "delta needs 2 < grid-min < grid-max and grid-points >= 2");
    Output out(o);
    std::function<double(double, int)> eval;
    if (o.f.empty()) {
        auto d = std::make_shared<DeltaKU>(build_delta(o.k, u));
        eval = [d](double w, int j) { return d->at_w(w, j); };
        out.comment("quantity", "Delta_{k,u}(w) = (psi_k(uv) - psi_k(u/v)) / (v - 1/v), w = v + 1/v, kernel order k");
    } else {
        const Model f = model_arg(o.f);
        const Model psi = log_derivative_psi(f);
        const WFunction D = delta_u_function(psi, to_real<HighReal>(u), o.k);
        eval = [D](double w, int j) { return static_cast<double>(D.eval(HighReal(w), j)); };
        out.comment("quantity", "Delta_u(f)(w) with psi_f = -x (log f)'");
        out.comment("f", to_string(f));
    }
    out.comment("k", std::to_string(o.k));
    out.comment("u", to_string(u));
    out.comment("grid", "w in [" + out.num(w_lo) + ", " + out.num(w_hi) + "], " + std::to_string(n) + " linear points");
    std::vector<std::string> cols{"w"};
    for (int j = 0; j <= o.k; ++j) cols.push_back(j == 0 ? "delta" : "delta_d" + std::to_string(j));
    out.header(cols);
    for (int i = 0; i < n; ++i) {
        const double w = w_lo + (w_hi - w_lo) * i / (n - 1);
        std::vector<std::string> row{out.num(w)};
        for (int j = 0; j <= o.k; ++j) row.push_back(out.num(eval(w, j)));
        out.row(row);
    }
    out.finish(0);
    return 0;
}

int run_verify(const Options& o) {
    require(o.n_max >= 1 && o.n_max <= 12, "--n-max must lie in [1, 12]");
    require(o.trials >= 1 && o.trials <= 1000, "--trials must lie in [1, 1000]");
    require(o.k_max >= 1 && o.k_max <= 60, "--k-max must lie in [1, 60]");
    VerifyOptions vo;
    vo.n_max = o.n_max;
    vo.trials = o.trials;
    vo.seed = o.seed;
    vo.k_max = o.k_max;
    std::vector<VerifySuite> chosen;
    for (const auto& s : verify_suites())
        if (o.suite == "all" || o.suite == s.name) chosen.push_back(s);
    require(!chosen.empty(), "unknown verify suite '" + o.suite + "'");
    Output out(o);
    out.comment("seed", std::to_string(o.seed));
    out.comment("n-max", std::to_string(o.n_max));
    out.comment("trials", std::to_string(o.trials));
    out.comment("k-max", std::to_string(o.k_max));
    int status = 0;
    if (chosen.size() == 1) {
        const VerifyResult r = run_verify(chosen.front(), vo);
        out.comment("suite", r.name);
        out.comment("identity", r.identity);
        out.header({"case", "residual", "tolerance", "status"});
        for (const auto& row : r.rows) out.row({row.label, out.num(row.residual), out.num(row.tolerance), row.passed() ? "pass" : "fail"});
        if (!r.error.empty()) out.comment("error", r.error);
        status = r.passed() ? 0 : 1;
    } else {
        out.header({"suite", "cases", "failures", "max_residual", "status", "identity"});
        for (const auto& s : chosen) {
            const VerifyResult r = run_verify(s, vo);
            if (!r.passed()) status = 1;
            out.row({r.name, std::to_string(r.rows.size()), std::to_string(r.failures()), out.num(r.max_residual()),
                     r.error.empty() ? (r.passed() ? "pass" : "fail") : "error: " + r.error, r.identity});
        }
    }
    out.finish(status);
    return status;
}

// ---------------------------------------------------------------------------
// Examples

int scan_table(Output& out, const std::vector<ScanRow>& rows, const Rational& step, double predicted) {
    out.header({"alpha", "verdict", "worst_margin", "location", "u", "method"});
    for (const auto& r : rows)
        out.row({to_string(r.alpha), verdict_name(r.verdict), out.num(r.worst_margin), out.num(r.location),
                 r.u ? out.num(*r.u) : "", r.method});
    const auto tr = find_transition(rows);
    const double s = to_real<double>(step);
    if (!tr) {
        out.comment("transition", "none (no single pass-to-fail switch on this grid)");
        return 1;
    }
    const double lp = to_real<double>(tr->last_pass), ff = to_real<double>(tr->first_fail);
    out.comment("transition", "last pass " + to_string(tr->last_pass) + ", first fail " + to_string(tr->first_fail));
    out.comment("predicted", out.num(predicted) + " (tolerance one step, " + to_string(step) + ")");
    const bool ok = lp <= predicted + 1e-12 && predicted <= ff + 1e-12 && predicted - lp <= s + 1e-12 && ff - predicted <= s + 1e-12;
    return ok ? 0 : 1;
}

std::vector<Rational> alphas_around(const Options& o, double centre) {
    const Rational step = rational_arg(o.alpha_step, "--alpha-step");
    require(step > 0, "--alpha-step must be positive");
    // Snap the centre onto the step lattice.
    const double s = to_real<double>(step);
    const Rational c = step * Rational(static_cast<long>(std::llround(centre / s)));
    Rational lo = o.alpha_min ? rational_arg(*o.alpha_min, "--alpha-min") : Rational(c - 5 * step);
    Rational hi = o.alpha_max ? rational_arg(*o.alpha_max, "--alpha-max") : Rational(c + 5 * step);
    if (lo <= 0) lo = step;
    if (hi >= 1) hi = 1 - step;
    require(lo <= hi, "--alpha-min must not exceed --alpha-max");
    return alpha_grid(lo, hi, step);
}

int example_cauchy_threshold(const Options& o, Output& out) {
    require_k(o.k, 1, 8);
    const GridConfig g = x_grid(o);
    const double predicted = 1.0 / (2 * o.k);
    out.comment("example", "f_a(x) = 1/(1 + 2cos(pi a)x + x^2) in power-regular HM_k iff 2ak <= 1");
    out.comment("k", std::to_string(o.k));
    out.comment("grid", g.describe());
    const auto alphas = alphas_around(o, predicted);
    const int status = scan_table(out, cauchy_threshold_scan(o.k, alphas, g), rational_arg(o.alpha_step, "--alpha-step"), predicted);
    out.finish(status);
    return status;
}

int example_hm_power(const Options& o, Output& out) {
    require_k(o.k, 2, 3);
    const Rational p = rational_arg(o.p, "--p");
    require(p > 0, "--p must be positive");
    const HyperbolicGrid g = w_grid(o);
    const double predicted = alpha_from_cos(hm_power_cos_threshold(o.k, to_real<double>(p)));
    out.comment("example", "f_a^p in HM_k iff cos(pi a) >= stated threshold (k = 2: 1/sqrt(2(p+1)), k = 3: sqrt(3/(2(p+2))))");
    out.comment("k", std::to_string(o.k));
    out.comment("p", to_string(p));
    out.comment("grid", g.describe());
    const auto alphas = alphas_around(o, predicted);
    const int status = scan_table(out, hm_power_threshold_scan(o.k, Coef(p), alphas, g), rational_arg(o.alpha_step, "--alpha-step"), predicted);
    out.finish(status);
    return status;
}

int example_gig(const Options& o, Output& out) {
    std::vector<int> ks = o.k_given ? std::vector<int>{o.k} : std::vector<int>{2, 3, 5};
    for (int k : ks) require_k(k, 2, 30);
    std::vector<Rational> as;
    if (o.alpha) as.push_back(alpha_arg(o, Rational(0)));
    else as = {make_rational(1, 4), make_rational(1, 2), make_rational(3, 4)};
    const std::vector<double> xs = real_list(o.x, {0.5, 1.0, 4.0}, "--x");
    for (double x : xs) require(x > 0, "--x must be positive");
    const double tol = o.tol.value_or(1e-8);
    out.comment("identity", "int Phi_{k-1}(x,t) c_k(a) t^{a-1} dt = a x^{a-1}, c_k(a) = a^2 prod_{i<k}(i^2 - a^2)/(2k-2)!");
    out.comment("tolerance", out.num(tol));
    out.header({"k", "alpha", "x", "integral", "target", "residual", "quad_error", "status"});
    int status = 0;
    for (int k : ks)
        for (const Rational& a : as)
            for (const auto& p : gig_identity_check(k, a, xs)) {
                const bool ok = p.residual < tol;
                if (!ok) status = 1;
                out.row({std::to_string(k), to_string(a), out.num(p.x), out.num(p.integral), out.num(p.target),
                         out.num(p.residual), out.num(p.quad_error), ok ? "pass" : "fail"});
            }
    for (const Rational& a : as)
        out.comment("product ratio k=10 a=" + to_string(a), out.num(gig_product_ratio(10, a)) + " (tends to 1)");
    out.finish(status);
    return status;
}

int example_recursion(const Options& o, Output& out) {
    const int k = o.k_given ? o.k : 3;
    require_k(k, 2, 20);
    const std::vector<double> xs = real_list(o.x, {0.5, 1.0, 3.0}, "--x");
    for (double x : xs) require(x > 0, "--x must be positive");
    const double tol = o.tol.value_or(1e-9);
    out.comment("identities", "1/(1+x) = (2n+1) int Phi_n(x,t) t^n (1+t)^{-2n-2} dt; Phi_k(x,1) = (2k-1) int Phi_{k-1}(x,t) t^-1 min(t^k, t^-k) dt; "
                              "general n < k recursion through (-1)^n u^{n+1}(u^n psi_k)^{(2n+1)}");
    out.comment("k", std::to_string(k));
    out.comment("tolerance", out.num(tol));
    out.header({"identity", "k", "n", "x", "lhs", "rhs", "residual", "status"});
    int status = 0;
    auto emit = [&](const IdentityPoint& p) {
        const bool ok = p.residual < tol;
        if (!ok) status = 1;
        out.row({p.identity, std::to_string(p.k), std::to_string(p.n), out.num(p.x), out.num(p.lhs), out.num(p.rhs),
                 out.num(p.residual), ok ? "pass" : "fail"});
    };
    const int n_curious = o.n ? *o.n : k;
    require(n_curious >= 1 && n_curious <= 20, "--n must lie in [1, 20]");
    for (double x : xs) emit(curious_formula_point(n_curious, x));
    for (double x : xs) emit(kernel_recursion_point(k, x));
    for (int n = 1; n < k; ++n)
        for (const auto& p : recursion_check(k, n, xs)) emit(p);
    out.finish(status);
    return status;
}

int example_levy(const Options& o, Output& out) {
    const int k = o.k_given ? o.k : 1;
    require_k(k, 1, 20);
    const std::vector<double> lams = o.lambdas.empty() ? std::vector<double>{0.5, 1.0, 2.0} : o.lambdas;
    for (double l : lams) require(l > 0, "--lambda must be positive");
    const double tol = o.tol.value_or(1e-9);
    const LevySpec s = levy_objects(k);
    out.comment("levy density", "x^-1 psi_k(1/x): " + s.density.str());
    out.comment("int (1 ^ x) nu_k(dx)", to_string(s.min_one_x_integral));
    out.comment("monotonicity defect of psi_k(1/x)", out.num(levy_monotonicity_defect(k)) + " (<= 0 means non-increasing on the grid)");
    out.comment("identity", "phi_k'(l) = int e^{-lx} psi_k(1/x) dx = int Phi_k(l,t) e^{-t} dt");
    out.comment("tolerance", out.num(tol));
    out.header({"lambda", "direct", "dual", "residual", "phi_k", "status"});
    int status = levy_monotonicity_defect(k) <= 0 ? 0 : 1;
    for (double l : lams) {
        const double a = levy_exponent_derivative_direct(k, l).value, b = levy_exponent_derivative_dual(k, l).value;
        const bool ok = std::abs(a - b) < tol;
        if (!ok) status = 1;
        out.row({out.num(l), out.num(a), out.num(b), out.num(std::abs(a - b)), out.num(levy_exponent(k, l).value), ok ? "pass" : "fail"});
    }
    out.finish(status);
    return status;
}

int example_laplace(const Options& o, Output& out) {
    const Rational a = alpha_arg(o, make_rational(1, 8));
    require(a < make_rational(1, 2), "--alpha must lie in (0, 1/2)");
    const std::vector<double> lams = o.lambdas.empty() ? std::vector<double>{0.0, 0.5, 1.0, 2.0} : o.lambdas;
    for (double l : lams) require(l >= 0, "--lambda must be nonnegative");
    const double tol = o.tol.value_or(1e-8);
    const LaplaceCheck c = cauchy_laplace_identity(a, lams);
    out.comment("identity", "1/(1 + 2cos(pi a)l + l^2) = (1/sin(pi a)) int e^{-lx} e^{-cos(pi a)x} sin(sin(pi a)x) dx");
    out.comment("alpha", to_string(a));
    out.comment("tolerance", out.num(tol));
    out.comment("integrand changes sign (not completely monotone)", c.integrand_changes_sign ? "yes" : "no");
    if (c.power_regular_order) out.comment("largest k with 2ak <= 1", std::to_string(*c.power_regular_order));
    out.header({"lambda", "direct", "laplace", "residual", "quad_error", "status"});
    int status = 0;
    for (const auto& p : c.points) {
        const bool ok = p.residual < tol;
        if (!ok) status = 1;
        out.row({out.num(p.lambda), out.num(p.direct), out.num(p.laplace), out.num(p.residual), out.num(p.quad_error), ok ? "pass" : "fail"});
    }
    out.finish(status);
    return status;
}

int example_cauchy_density(const Options& o, Output& out) {
    require_k(o.k, 2, 12);
    const Rational a = alpha_arg(o, make_rational(1, 3));
    const CauchyFamily fam = cauchy_family(a);
    const double tol = o.tol.value_or(1e-12);
    InvertOptions io;
    io.throw_on_negative = false;
    const InversionResult inv = invert(fam.g, o.k, io);
    out.comment("quantity", "density of the measure representing -(log f_a)' = 2(cos(pi a) + x) f_a against Phi_{k-1}");
    out.comment("alpha", to_string(a));
    out.comment("k", std::to_string(o.k));
    if (fam.exact()) out.comment("exact density", cauchy_density_exact(fam, o.k).str());
    out.comment("tolerance", out.num(tol) + " relative");
    out.header({"t", "closed_form", "inversion", "residual", "status"});
    const std::vector<double> ts = real_list(o.x, {0.1, 0.5, 1.0, 2.0, 10.0}, "--x");
    int status = 0;
    for (double t : ts) {
        require(t > 0, "--x must be positive");
        const HighReal c = cauchy_density(fam, o.k, HighReal(t)), d = evaluate(inv.density, HighReal(t));
        const double res = static_cast<double>(abs(c - d) / std::max(HighReal(1), abs(c)));
        const bool ok = res < tol;
        if (!ok) status = 1;
        out.row({out.num(t), out.num(c), out.num(d), out.num(res), ok ? "pass" : "fail"});
    }
    if (inv.negative_witness)
        out.comment("sign", "density negative at t = " + out.num(inv.negative_witness->first) + ": -(log f_a)' is not in S_k");
    out.finish(status);
    return status;
}

int run_example(const Options& o) {
    Output out(o);
    if (o.name == "cauchy-threshold") return example_cauchy_threshold(o, out);
    if (o.name == "hm-power") return example_hm_power(o, out);
    if (o.name == "gig") return example_gig(o, out);
    if (o.name == "recursion") return example_recursion(o, out);
    if (o.name == "levy") return example_levy(o, out);
    if (o.name == "laplace") return example_laplace(o, out);
    if (o.name == "cauchy-density") return example_cauchy_density(o, out);
    throw UsageError("unknown example '" + o.name + "'");
}

// ---------------------------------------------------------------------------
// Explore (non-normative scans)

int explore_gegenbauer(const Options& o, Output& out) {
    require_k(o.k, 2, 8);
    require(o.steps >= 1 && o.steps <= 20, "--steps must lie in [1, 20]");
    const HyperbolicGrid g = w_grid(o);
    std::vector<Rational> ps;
    for (const auto& s : o.ps.empty() ? std::vector<std::string>{"1/2", "1", "2", "4"} : o.ps) ps.push_back(rational_arg(s, "--ps"));
    out.comment("note", "non-normative: open conjecture, scanned only, nothing asserted");
    out.comment("conjecture", "f_a^p in HM_k iff cos(pi a) >= largest root of the Gegenbauer polynomial C_k^p");
    out.comment("k", std::to_string(o.k));
    out.comment("grid", g.describe());
    out.comment("bisection steps", std::to_string(o.steps) + " on alpha in [0, 1/2]; non-pass verdicts count as fail");
    out.header({"p", "gegenbauer_root", "conjectured_alpha", "bracket_lo", "bracket_hi", "stated_alpha"});
    for (const Rational& p : ps) {
        require(p > 0, "--ps entries must be positive");
        const double root = gegenbauer_largest_root(o.k, to_real<double>(p));
        Rational lo(0), hi = make_rational(1, 2);
        for (int i = 0; i < o.steps; ++i) {
            const Rational mid = (lo + hi) / 2;
            const Verdict v = hm_power_threshold_scan(o.k, Coef(p), {mid}, g).front().verdict;
            if (v == Verdict::Pass) lo = mid;
            else hi = mid;
        }
        const std::string stated = o.k <= 3 ? out.num(alpha_from_cos(hm_power_cos_threshold(o.k, to_real<double>(p)))) : "";
        out.row({to_string(p), out.num(root), out.num(alpha_from_cos(root)), to_string(lo), to_string(hi), stated});
    }
    out.finish(0);
    return 0;
}

int explore_power_closure(const Options& o, Output& out) {
    require_k(o.k, 1, 8);
    const Model f = model_arg(o.f.empty() ? std::string("rat(1;1+x)") : o.f);
    const HyperbolicGrid g = w_grid(o);
    out.comment("note", "non-normative: whether f in HM_k implies f^p in HM_k for p >= 1 is open; scanned only");
    out.comment("f", to_string(f));
    out.comment("k", std::to_string(o.k));
    out.comment("grid", g.describe());
    out.header({"p", "verdict", "worst_margin", "location", "u", "method"});
    for (const auto& s : o.ps.empty() ? std::vector<std::string>{"1", "3/2", "2", "3", "5"} : o.ps) {
        const Rational p = rational_arg(s, "--ps");
        require(p > 0, "--ps entries must be positive");
        const MembershipReport r = check_HMk(model::scale(Coef(p), f), o.k, g);
        out.row({to_string(p), verdict_name(r.verdict), out.num(r.worst_margin), out.num(r.location), r.u ? out.num(*r.u) : "", r.method});
    }
    out.finish(0);
    return 0;
}

int run_explore(const Options& o) {
    Output out(o);
    if (o.name == "gegenbauer") return explore_gegenbauer(o, out);
    if (o.name == "power-closure") return explore_power_closure(o, out);
    throw UsageError("unknown explore scan '" + o.name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-order Stieltjes calculus: kernels, transforms, inversion, membership tests and identity checks"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all verbs");
    Options o;

    app.add_option("--k", o.k, "Order k")->capture_default_str()->each([&](const std::string&) { o.k_given = true; });
    app.add_option("--alpha", o.alpha, "Cauchy parameter alpha (rational, e.g. 1/8)");
    app.add_option("--u", o.u, "Hyperbolic base point u > 0 (rational)");
    app.add_option("--x", o.x, "Evaluation point(s), comma separated rationals")->delimiter(',');
    app.add_option("--t", o.t, "Kernel pole location t >= 0 (rational)")->capture_default_str();
    app.add_option("--grid-min", o.grid_min, "Grid lower bound (x grid, u grid or w range depending on the verb)");
    app.add_option("--grid-max", o.grid_max, "Grid upper bound");
    app.add_option("--grid-points", o.grid_points, "Grid size");
    app.add_option("--tol", o.tol, "Sign tolerance for membership tests; residual tolerance for examples");
    app.add_option("--precision-bits", o.precision_bits, "Significant bits printed (53 = double, up to 113)")
        ->capture_default_str()
        ->check(CLI::Range(11, 113));
    app.add_option("--seed", o.seed, "Seed for randomized checks")->capture_default_str();
    app.add_option("--format", o.format, "Output format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", o.out, "Write output to this file instead of stdout");

    auto verb = [&](const char* name, const char* help) {
        CLI::App* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };
    CLI::App* kernel = verb("kernel", "Exact Phi_k(x,t) (or an x-derivative) at rational points");
    kernel->add_option("--derivative", o.derivative, "x-derivative order")->capture_default_str();

    CLI::App* transform = verb("transform", "Forward transform f(x) = drift + int Phi_{k-1}(x,t) mu(dt)");
    transform->add_option("--measure", o.measure, "Measure as JSON text or a JSON file path")->required();
    transform->add_option("--drift", o.drift, "Nonnegative drift (rational)")->capture_default_str();

    CLI::App* invert_cmd = verb("invert", "Recover drift, atom at 0 and density of f in S_k");
    invert_cmd->add_option("--f", o.f, "Function model, e.g. rat(1;1+x)")->required();

    std::vector<CLI::App*> tests;
    for (const char* name : {"test-sk", "test-mk", "test-hmk", "test-hmk-hat"}) {
        CLI::App* s = verb(name, name == std::string("test-mk") ? "Grid test for M_k; --f is a function of w on (2, inf)"
                                                                : "Grid membership test");
        s->add_option("--f", o.f, "Function model")->required();
        s->add_option("--w-max", o.w_max, "Largest w on hyperbolic grids");
        s->add_option("--w-points", o.w_points, "Number of w points on hyperbolic grids");
        if (name == std::string("test-hmk-hat"))
            s->add_option("--route", o.route, "direct (x^{-1} psi_f in S_k) or delta (Delta_u(f) in M_{k-1})")
                ->capture_default_str()
                ->check(CLI::IsMember({"direct", "delta"}));
        tests.push_back(s);
    }

    CLI::App* delta = verb("delta", "CSV rows (w, Delta, Delta', ..., Delta^(k)) for the kernel or for --f");
    delta->add_option("--f", o.f, "Function model (default: the order-k kernel)");

    CLI::App* verify = verb("verify", "Identity suites; 'all' prints a pass/fail matrix");
    std::vector<std::string> suite_names{"all"};
    for (const auto& s : verify_suites()) suite_names.push_back(s.name);
    verify->add_option("suite", o.suite, "Suite name")->capture_default_str()->check(CLI::IsMember(suite_names));
    verify->add_option("--n-max", o.n_max, "Largest operator order")->capture_default_str();
    verify->add_option("--trials", o.trials, "Random cases per parameter")->capture_default_str();
    verify->add_option("--k-max", o.k_max, "Largest kernel order for kernel-exact")->capture_default_str();

    CLI::App* example = verb("example", "Worked examples with checks");
    example->add_option("name", o.name, "Example")
        ->required()
        ->check(CLI::IsMember({"cauchy-threshold", "hm-power", "gig", "recursion", "levy", "laplace", "cauchy-density"}));
    example->add_option("--p", o.p, "Power p > 0 (hm-power)")->capture_default_str();
    example->add_option("--lambda", o.lambdas, "Laplace variable(s)")->delimiter(',');
    example->add_option("--n", o.n, "Order n of the 1/(1+x) identity (recursion)");
    example->add_option("--alpha-min", o.alpha_min, "Scan start (threshold examples)");
    example->add_option("--alpha-max", o.alpha_max, "Scan end");
    example->add_option("--alpha-step", o.alpha_step, "Scan step")->capture_default_str();
    example->add_option("--w-max", o.w_max, "Largest w on hyperbolic grids");
    example->add_option("--w-points", o.w_points, "Number of w points on hyperbolic grids");

    CLI::App* explore = verb("explore", "Non-normative scans of open questions");
    explore->add_option("name", o.name, "Scan")->required()->check(CLI::IsMember({"gegenbauer", "power-closure"}));
    explore->add_option("--ps", o.ps, "Powers p (comma separated rationals)")->delimiter(',');
    explore->add_option("--f", o.f, "Function model (power-closure)");
    explore->add_option("--steps", o.steps, "Bisection steps (gegenbauer)")->capture_default_str();
    explore->add_option("--w-max", o.w_max, "Largest w on hyperbolic grids");
    explore->add_option("--w-points", o.w_points, "Number of w points on hyperbolic grids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (kernel->parsed()) return run_kernel(o);
        if (transform->parsed()) return run_transform(o);
        if (invert_cmd->parsed()) return run_invert(o);
        for (CLI::App* s : tests)
            if (s->parsed()) return run_test(o, s->get_name());
        if (delta->parsed()) return run_delta(o);
        if (verify->parsed()) return run_verify(o);
        if (example->parsed()) return run_example(o);
        if (explore->parsed()) return run_explore(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
