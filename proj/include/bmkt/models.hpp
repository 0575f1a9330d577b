#pragma once

#include <complex>
#include <functional>
#include <string>
#include <string_view>

namespace bmkt {

using Complex = std::complex<double>;

/// Self-similarity relation between the force spectrum and the observable
/// spectrum.
enum class Variant {
  WhiteNoise,         // constant force spectrum, exponential ACF
  LinearSelfSimilar,  // force shape == observable shape (Rubin model)
  StockTheta,         // stock driven by the market-memory force
  Scaling,            // force shape g(p) = y(theta p)
  Fractional,         // force shape g(p) = y(p)^theta
  Boltzmann,          // g = 1 + ln y
  Differential,       // dC_FF/dp = C_RR / tau_R
};

std::string to_string(Variant v);
Variant parse_variant(std::string_view name);

/// One model variant with its time scales. theta = tau_R / tau_r is always
/// derived. Stock variants (StockTheta, Scaling, Fractional) accept
/// tau_R == 0, the memoryless heaviest stock.
struct ModelSpec {
  Variant variant = Variant::LinearSelfSimilar;
  double tau_R = 1.0;
  double tau_r = 1.0;
  double variance = 1.0;

  static ModelSpec white_noise(double tau_R, double variance = 1.0);
  static ModelSpec linear(double tau_R, double variance = 1.0);
  static ModelSpec boltzmann(double tau_R, double variance = 1.0);
  static ModelSpec differential(double tau_R, double variance = 1.0);
  /// Stock variants parameterized by the stock time and theta.
  static ModelSpec stock(Variant variant, double tau_r, double theta, double variance = 1.0);

  bool is_stock() const noexcept;
  double theta() const noexcept { return tau_R / tau_r; }
  /// tau_r for stock variants, tau_R otherwise; C~(0) = variance * time.
  double correlation_time() const noexcept { return is_stock() ? tau_r : tau_R; }
  void validate() const;
};

enum class StockLabel { Heavy, Neutral, Light, UltraLight };

struct StockClass {
  StockLabel label;
  double theta;
};

std::string to_string(StockLabel label);

/// Heavy [0, 2/3), Neutral [2/3, 4/3), Light [4/3, 2), UltraLight [2, inf).
StockClass classify_theta(double theta);

/// True when the shapes may be evaluated off the real axis.
bool complex_capable(Variant v) noexcept;

/// Normalized observable shape y(p) = C~(p) / C~(0); Re p >= 0.
Complex observable_shape(const ModelSpec& model, Complex p);

/// Normalized force shape g(p) = C~_FF(p) / C~_FF(0); Re p >= 0.
Complex force_shape(const ModelSpec& model, Complex p);

/// Dimensionful images: C~(p) = variance * tau * y(p) and
/// C~_FF(p) = (variance / tau) * g(p), tau = correlation_time().
Complex observable_image(const ModelSpec& model, Complex p);
Complex force_image(const ModelSpec& model, Complex p);

/// |y(p) [tau p + g(p)] - 1|, the normalized form of the exact relation
/// between the observable and force images.
double identity_residual(const ModelSpec& model, Complex p);

bool has_closed_form(const ModelSpec& model) noexcept;

/// Normalized ACF for the variants with an elementary time-domain form.
/// Throws CapabilityError otherwise.
double closed_form_acf(const ModelSpec& model, double tau);

struct FunctionalSolution {
  double value = 0.0;
  double residual = 0.0;  ///< |y (tau_r p + g) - 1|
  int iterations = 0;
};

/// Solves the Scaling or Fractional functional equation at real p >= 0.
/// Throws ConvergenceError carrying the last residual if the budget runs out.
FunctionalSolution solve_functional_shape(const ModelSpec& model, double p);

/// A normalized Laplace shape bound to the metadata the inverter needs.
class ShapeEvaluator {
 public:
  enum class Kind { Observable, Force, Custom };

  static ShapeEvaluator observable(const ModelSpec& model);
  static ShapeEvaluator force(const ModelSpec& model);
  /// `inversion_scale` T makes T * fn(p) the Laplace image of an ACF with
  /// value 1 at lag 0; `frequency_scale` is the highest characteristic
  /// frequency; `image_at_zero` converts the shape to a dimensionful image.
  static ShapeEvaluator custom(std::function<Complex(Complex)> fn, double inversion_scale,
                               double frequency_scale, double image_at_zero = 1.0,
                               bool complex_capable = true, std::string name = "custom");

  Complex operator()(Complex p) const { return fn_(p); }
  Kind kind() const noexcept { return kind_; }
  bool complex_capable() const noexcept { return complex_capable_; }
  double inversion_scale() const noexcept { return inversion_scale_; }
  double frequency_scale() const noexcept { return frequency_scale_; }
  double image_at_zero() const noexcept { return image_at_zero_; }
  const std::string& name() const noexcept { return name_; }

 private:
  ShapeEvaluator() = default;

  std::function<Complex(Complex)> fn_;
  Kind kind_ = Kind::Custom;
  bool complex_capable_ = false;
  double inversion_scale_ = 0.0;
  double frequency_scale_ = 0.0;
  double image_at_zero_ = 1.0;
  std::string name_;
};

}  // namespace bmkt
