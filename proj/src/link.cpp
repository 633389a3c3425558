#include "xbx/link.hpp"

#include <cmath>

#include "xbx/errors.hpp"
#include "xbx/special.hpp"

namespace xbx {

std::string LinkFunction::name() const {
  switch (kind_) {
    case LinkKind::Logit: return "logit";
    case LinkKind::Probit: return "probit";
    case LinkKind::Cloglog: return "cloglog";
    case LinkKind::Log: return "log";
    case LinkKind::Identity: return "identity";
  }
  return "identity";
}

LinkFunction LinkFunction::parse(const std::string& name) {
  if (name == "logit") return LinkFunction(LinkKind::Logit);
  if (name == "probit") return LinkFunction(LinkKind::Probit);
  if (name == "cloglog") return LinkFunction(LinkKind::Cloglog);
  if (name == "log") return LinkFunction(LinkKind::Log);
  if (name == "identity") return LinkFunction(LinkKind::Identity);
  throw DomainError("unknown link function '" + name + "'");
}

double LinkFunction::link(double mu) const {
  switch (kind_) {
    case LinkKind::Logit: return std::log(mu / (1.0 - mu));
    case LinkKind::Probit: {
      if (!(mu > 0.0 && mu < 1.0)) return mu <= 0.0 ? -INFINITY : INFINITY;
      // Newton on the lower tail, Phi(-eta) = 1 - mu handled by symmetry.
      const double tail = mu < 0.5 ? mu : 1.0 - mu;
      double eta = -std::sqrt(-2.0 * std::log(tail));
      for (int it = 0; it < 100; ++it) {
        const double step = (std_normal_cdf(eta) - tail) / std_normal_pdf(eta);
        eta -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(eta))) break;
      }
      return mu < 0.5 ? eta : -eta;
    }
    case LinkKind::Cloglog: return std::log(-std::log1p(-mu));
    case LinkKind::Log: return std::log(mu);
    case LinkKind::Identity: return mu;
  }
  return mu;
}

double LinkFunction::inverse(double eta) const {
  switch (kind_) {
    case LinkKind::Logit: return 1.0 / (1.0 + std::exp(-eta));
    case LinkKind::Probit: return std_normal_cdf(eta);
    case LinkKind::Cloglog: return -std::expm1(-std::exp(eta));
    case LinkKind::Log: return std::exp(eta);
    case LinkKind::Identity: return eta;
  }
  return eta;
}

double LinkFunction::inverse_derivative(double eta) const {
  switch (kind_) {
    case LinkKind::Logit: {
      const double e = std::exp(-std::abs(eta));
      return e / ((1.0 + e) * (1.0 + e));
    }
    case LinkKind::Probit: return std_normal_pdf(eta);
    case LinkKind::Cloglog: return std::exp(eta - std::exp(eta));
    case LinkKind::Log: return std::exp(eta);
    case LinkKind::Identity: return 1.0;
  }
  return 1.0;
}

}  // namespace xbx
