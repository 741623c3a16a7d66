#pragma once

#include <map>
#include <string>
#include <variant>

#include "sysnr/sampling.hpp"
#include "sysnr/theory.hpp"

namespace sysnr {

struct HhForm {};

/// ybar** + b (X - xbar*)
struct LrForm {
    double b = 0;
};

/// w11 ybar** + w12 (X - xbar*)
struct T1Form {
    double w11 = 1;
    double w12 = 0;
};

/// [w21 ybar** + w22 (X - xbar*)] [X / (alpha X + (1 - alpha) xbar*)]^delta
struct T2Form {
    double w21 = 1;
    double w22 = 0;
    double alpha = 0;
    double delta = 1;
};

/// gamma [ybar** + b (X - xbar*)]
struct T3Form {
    double gamma = 1;
    double b = 0;
};

using EstimatorForm = std::variant<HhForm, LrForm, T1Form, T2Form, T3Form>;

struct EstimatorSpec {
    EstimatorForm form;
    double xbar_pop = 0;  // known population mean of x

    /// Throws SpecError on non-finite constants, alpha outside [0, 1] or a zero xbar_pop.
    EstimatorSpec(EstimatorForm f, double xbar);

    Estimator variant() const;

    /// Constants keyed by name (w11, w12, w21, w22, alpha, delta, gamma, b).
    std::map<std::string, double> constants() const;

    /// Build from named constants. Missing required names raise SpecError.
    static EstimatorSpec from_constants(Estimator variant, const std::map<std::string, double>& constants,
                                        double xbar_pop);
};

/// ybar** = (n1 ybar_n1 + n2 ybar_h2) / n. Throws EvaluationError when the
/// sample has non-respondents but no sub-sample.
double hh_mean(const SampleRealization& r);

/// Evaluates the spec's formula literally. Throws EvaluationError when the t2
/// denominator alpha X + (1 - alpha) xbar* is not positive.
double point_estimate(const EstimatorSpec& spec, const SampleRealization& r);

/// s_xy / s_x^2 over responders and sub-sampled non-respondents.
double sample_slope(const Population& pop, const SampleRealization& r);

}  // namespace sysnr
