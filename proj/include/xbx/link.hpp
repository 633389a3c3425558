#pragma once

#include <string>

namespace xbx {

enum class LinkKind { Logit, Probit, Cloglog, Log, Identity };

/// Monotone link g between a constrained parameter and a linear predictor.
class LinkFunction {
 public:
  LinkFunction() = default;
  explicit LinkFunction(LinkKind kind) : kind_(kind) {}

  LinkKind kind() const { return kind_; }
  std::string name() const;

  /// g(mu)
  double link(double mu) const;
  /// g^{-1}(eta)
  double inverse(double eta) const;
  /// d mu / d eta at eta
  double inverse_derivative(double eta) const;

  static LinkFunction parse(const std::string& name);

  friend bool operator==(const LinkFunction&, const LinkFunction&) = default;

 private:
  LinkKind kind_ = LinkKind::Identity;
};

}  // namespace xbx
