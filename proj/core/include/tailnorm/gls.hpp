#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tailnorm/errors.hpp"
#include "tailnorm/estimates.hpp"
#include "tailnorm/grids.hpp"
#include "tailnorm/json_io.hpp"
#include "tailnorm/moments.hpp"
#include "tailnorm/tails.hpp"

// Grand Lebesgue machinery: the weight families psi(p), the norm
// sup_p |f|_p / psi(p), the Chebyshev-Markov tail bound it implies, and the
// converse comparison against the Lorentz quasinorm.

namespace tailnorm {

enum class PsiFamily {
    flat,      // 1 on [1, r], support closed at r
    power,     // p^{1/m} on [1, inf)
    exp_power, // e^{C p^beta} on [1, inf)
    grand,     // (b - p)^{-gamma/b} on [1, b)
};

const char* psi_family_name(PsiFamily f);

class PsiFunction {
public:
    // Normalized weight: the raw family formula divided by its infimum over
    // the support, so inf psi = 1 and psi >= 1 everywhere.
    double operator()(double p) const { return std::exp(log_eval(p)); }
    double log_eval(double p) const;
    // Family formula before normalization.
    double raw(double p) const;
    // h(p) = p ln psi(p), the exponent whose conjugate drives the tail bound.
    double h(double p) const { return p * log_eval(p); }

    double b() const { return b_; }              // support endpoint; inf when unbounded
    bool closed_end() const { return closed_; }  // flat supports include p = b
    bool contains(double p) const;
    double normalization() const { return norm_; } // raw inf over the support

    PsiFamily family() const { return family_; }
    const std::string& name() const { return name_; }
    const std::vector<std::pair<std::string, double>>& params() const { return params_; }

    static PsiFunction flat(double r);
    static PsiFunction power(double m);
    static PsiFunction exp_power(double C, double beta);
    static PsiFunction grand(double b, double gamma);

    JsonValue to_json() const;

private:
    PsiFunction() = default;

    PsiFamily family_ = PsiFamily::flat;
    std::string name_;
    std::vector<std::pair<std::string, double>> params_;
    double b_ = 0.0;
    bool closed_ = false;
    double norm_ = 1.0;
};

// Factory keyed by family tag (the serialization entry point).
// Parameter keys: flat: r     power: m     exp-power: C, beta     grand: b, gamma
PsiFunction make_psi(const std::string& family,
                     const std::vector<std::pair<std::string, double>>& params);

// Parse the JSON form {"family": ..., "params": {...}}.
PsiFunction psi_from_json(const std::string& text);

// The exponent grid a psi family is naturally estimated over: a pole grid
// into b for grand weights, a closed grid for flat ones, a doubling cap grid
// when the support is unbounded.
LeveledGrid default_psi_grid(const PsiFunction& psi);

struct GlsOptions {
    // A supremum trace growing by at least this factor at every refinement
    // level is flagged as diverged.  The pole grids halve the gap b - p per
    // level, so a (b-p)^{-gamma/b} blowup grows by 2^{gamma/b} per level;
    // the factor must sit safely below that (1.26 for b = 3, gamma = 1).
    double growth_threshold = 1.05;
};

// sup over the curve's grid of |f|_p / psi(p), with the per-level supremum
// trace.  The curve must have been computed on a grid inside psi's support.
NormEstimate gls_norm(const MomentCurve& curve, const PsiFunction& psi,
                      const GlsOptions& opt = {});

// The tail bound S(x) = exp(-h*(ln(x/V))) implied by a Gpsi-norm V, with the
// conjugate h* taken over the supplied exponent grid.  Each grid point p
// contributes the Markov bound (V psi(p)/x)^p, so a tail whose curve-built
// norm over the same grid is V is dominated by S pointwise by construction.
// The returned function is exactly the grid envelope: its far tail is
// polynomial of order max(grid), which fixes the critical exponents.
TailFunction gls_tail_bound(const PsiFunction& psi, double V, const LeveledGrid& p_grid);
TailFunction gls_tail_bound(const PsiFunction& psi, double V);

struct RPsiOptions {
    double growth_threshold = 1.05;
    CapGridOptions grid; // caps both the sup variable and the conjugate argmax
};

// R[psi] = sup_y [h*'(y)]^{1/y} for unbounded-support weights, h*'(y) taken
// as the conjugate argmax.  Each level recomputes the sup with both the y
// reach and the argmax cap doubled; a trace still growing at the cap sets
// the diverged flag.  Finite b throws not_applicable_error.
NormEstimate r_psi(const PsiFunction& psi, const RPsiOptions& opt = {});

// Both sides of the converse norm comparison
//   gls_norm  <=  2 R[psi] e^{1/e} * lorentz_quasinorm(tail, S_psi)
// with S_psi the unit-norm bound shape.
struct ConverseBoundReport {
    NormEstimate direct;  // left side, from the tail's moment curve
    NormEstimate r;       // R[psi]
    NormEstimate lorentz; // quasinorm against gls_tail_bound(psi, 1)
    double bound = inf;   // 2 R e^{1/e} lorentz
    double ratio = inf;   // direct / bound
    bool holds = false;   // direct <= bound with every estimate finite
};

ConverseBoundReport gls_converse_bound(const TailFunction& tail, const PsiFunction& psi,
                                       const GlsOptions& opt = {});

} // namespace tailnorm
