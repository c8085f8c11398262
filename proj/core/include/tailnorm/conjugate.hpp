#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tailnorm/errors.hpp"
#include "tailnorm/numerics.hpp"

namespace tailnorm {

// Half-line (or interval) domain of a convex function.  The lower end is
// always closed; the upper end is open for functions with a pole there.
struct ConvexDomain {
    double lo = 0.0;
    double end = inf;
    bool closed_end = false;
};

struct ConjugatePoint {
    double value = 0.0;
    double argmax = 0.0;
    bool attained = true; // false when the supremum runs off an open end
};

// f*(x) = sup_{lambda in dom} (lambda*x - f(lambda)).  warm_lo narrows the
// bracket from below; valid because the maximizer is nondecreasing in x.
ConjugatePoint conjugate_value(const std::function<double(double)>& f,
                               const ConvexDomain& dom, double x,
                               double warm_lo = -inf);

struct DerivativeResult {
    double value = 0.0;
    bool one_sided = false; // x had grid neighbors on one side only
};

// A convex function known on a grid.  Evaluation either delegates to a
// closed-form closure or linearly interpolates the stored vertices; the
// vertex values must pass a discrete convexity check.  +inf entries mark
// points where a conjugate's supremum is unbounded.
class SampledConvexFunction {
  public:
    SampledConvexFunction(std::string name, std::function<double(double)> eval,
                          ConvexDomain dom, std::vector<double> grid);
    SampledConvexFunction(std::string name, std::vector<double> grid,
                          std::vector<double> values, ConvexDomain dom);

    double operator()(double x) const;
    const std::string& name() const { return name_; }
    const ConvexDomain& domain() const { return dom_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    // maximizer trace; filled only for results of conjugate()
    const std::vector<double>& argmax() const { return argmax_; }
    bool has_infinite_values() const;
    std::string csv() const; // columns: x, f_star

  private:
    friend SampledConvexFunction conjugate(const std::function<double(double)>&,
                                           const ConvexDomain&,
                                           const std::vector<double>&,
                                           const std::string&);
    SampledConvexFunction() = default;
    void check_convexity() const;

    std::string name_;
    std::function<double(double)> eval_;
    ConvexDomain dom_;
    std::vector<double> grid_;
    std::vector<double> values_;
    std::vector<double> argmax_;
};

// Conjugate of f on every point of x_grid (ascending, nonnegative).  The
// result evaluates off-grid arguments by re-running the maximization, so
// derivative probes are not limited by grid resolution.
SampledConvexFunction conjugate(const std::function<double(double)>& f,
                                const ConvexDomain& dom,
                                const std::vector<double>& x_grid,
                                const std::string& name = "conjugate");
SampledConvexFunction conjugate(const SampledConvexFunction& f,
                                const std::vector<double>& x_grid);

// Max |f** - f| over interior grid points.  The intermediate conjugate is
// sampled on a slope-range grid with u_points entries (half geometric for
// pole regions, half linear).
double fenchel_moreau_check(const SampledConvexFunction& f,
                            std::size_t u_points = 4000);

// d f*/dx at x from the three nearest vertices (parabolic fit); equals the
// maximizing lambda when f_star came from conjugate().
DerivativeResult conjugate_derivative(const SampledConvexFunction& f_star, double x);

} // namespace tailnorm
