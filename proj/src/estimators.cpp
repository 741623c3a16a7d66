#include "sysnr/estimators.hpp"

#include <cmath>

#include "sysnr/error.hpp"

namespace sysnr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw SpecError(std::string("constant '") + name + "' is not finite");
}

double required(const std::map<std::string, double>& c, const std::string& name, Estimator e) {
    const auto it = c.find(name);
    if (it == c.end())
        throw SpecError("missing constant '" + name + "' for estimator " + std::string(to_string(e)));
    return it->second;
}

}  // namespace

EstimatorSpec::EstimatorSpec(EstimatorForm f, double xbar) : form(f), xbar_pop(xbar) {
    if (!std::isfinite(xbar_pop) || xbar_pop == 0) throw SpecError("known population mean of x must be finite and non-zero");
    std::visit(overloaded{
                   [](const HhForm&) {},
                   [](const LrForm& v) { require_finite(v.b, "b"); },
                   [](const T1Form& v) {
                       require_finite(v.w11, "w11");
                       require_finite(v.w12, "w12");
                   },
                   [](const T2Form& v) {
                       require_finite(v.w21, "w21");
                       require_finite(v.w22, "w22");
                       require_finite(v.delta, "delta");
                       if (!(v.alpha >= 0.0 && v.alpha <= 1.0)) throw SpecError("t2 alpha must lie in [0, 1]");
                   },
                   [](const T3Form& v) {
                       require_finite(v.gamma, "gamma");
                       require_finite(v.b, "b");
                   },
               },
               form);
}

Estimator EstimatorSpec::variant() const {
    static constexpr Estimator kOrder[] = {Estimator::hh, Estimator::lr, Estimator::t1, Estimator::t2, Estimator::t3};
    return kOrder[form.index()];
}

std::map<std::string, double> EstimatorSpec::constants() const {
    return std::visit(overloaded{
                          [](const HhForm&) { return std::map<std::string, double>{}; },
                          [](const LrForm& v) { return std::map<std::string, double>{{"b", v.b}}; },
                          [](const T1Form& v) { return std::map<std::string, double>{{"w11", v.w11}, {"w12", v.w12}}; },
                          [](const T2Form& v) {
                              return std::map<std::string, double>{
                                  {"w21", v.w21}, {"w22", v.w22}, {"alpha", v.alpha}, {"delta", v.delta}};
                          },
                          [](const T3Form& v) { return std::map<std::string, double>{{"gamma", v.gamma}, {"b", v.b}}; },
                      },
                      form);
}

EstimatorSpec EstimatorSpec::from_constants(Estimator e, const std::map<std::string, double>& c, double xbar_pop) {
    switch (e) {
        case Estimator::hh: return {HhForm{}, xbar_pop};
        case Estimator::lr: return {LrForm{required(c, "b", e)}, xbar_pop};
        case Estimator::t1: return {T1Form{required(c, "w11", e), required(c, "w12", e)}, xbar_pop};
        case Estimator::t2:
            return {T2Form{required(c, "w21", e), required(c, "w22", e), required(c, "alpha", e), required(c, "delta", e)},
                    xbar_pop};
        case Estimator::t3: return {T3Form{required(c, "gamma", e), required(c, "b", e)}, xbar_pop};
    }
    throw SpecError("unknown estimator");
}

double hh_mean(const SampleRealization& r) {
    if (r.n() == 0) throw EvaluationError("empty realization");
    const double n = static_cast<double>(r.n());
    if (r.n2() == 0) return *r.y_resp_mean;
    if (!r.y_sub_mean) throw EvaluationError("realization has non-respondents but an empty sub-sample");
    const double resp = r.n1() > 0 ? static_cast<double>(r.n1()) * *r.y_resp_mean : 0.0;
    return (resp + static_cast<double>(r.n2()) * *r.y_sub_mean) / n;
}

double point_estimate(const EstimatorSpec& spec, const SampleRealization& r) {
    const double ybar = hh_mean(r);
    const double gap = spec.xbar_pop - r.x_mean;
    return std::visit(overloaded{
                          [&](const HhForm&) { return ybar; },
                          [&](const LrForm& v) { return ybar + v.b * gap; },
                          [&](const T1Form& v) { return v.w11 * ybar + v.w12 * gap; },
                          [&](const T2Form& v) {
                              const double denom = v.alpha * spec.xbar_pop + (1.0 - v.alpha) * r.x_mean;
                              if (!(denom > 0))
                                  throw EvaluationError("t2 denominator alpha*X + (1-alpha)*xbar* is not positive");
                              return (v.w21 * ybar + v.w22 * gap) * std::pow(spec.xbar_pop / denom, v.delta);
                          },
                          [&](const T3Form& v) { return v.gamma * (ybar + v.b * gap); },
                      },
                      spec.form);
}

double sample_slope(const Population& pop, const SampleRealization& r) {
    std::vector<std::size_t> observed = r.responders;
    observed.insert(observed.end(), r.subsample.begin(), r.subsample.end());
    if (observed.size() < 2) throw DegenerateError("sample slope needs at least two observed units");
    double my = 0, mx = 0;
    for (auto p : observed) {
        my += pop[p - 1].y;
        mx += pop[p - 1].x;
    }
    my /= static_cast<double>(observed.size());
    mx /= static_cast<double>(observed.size());
    double sxy = 0, sxx = 0;
    for (auto p : observed) {
        sxy += (pop[p - 1].x - mx) * (pop[p - 1].y - my);
        sxx += (pop[p - 1].x - mx) * (pop[p - 1].x - mx);
    }
    if (sxx == 0) throw DegenerateError("sample slope undefined: observed x values are constant");
    return sxy / sxx;
}

}  // namespace sysnr
