#pragma once

#include <stdexcept>
#include <string>

namespace qghjm {

/// Invalid model, curve or simulation configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The deterministic limit is only defined for the log-normal case.
class UnsupportedGamma : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// CEV exponent outside (1/2, 1]; the process is non-explosive there.
class GammaOutOfRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InfeasibleWedge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every Monte Carlo path exploded, so the excluded-path mean is undefined.
class EmptySample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A zero coupon bond price underflowed to zero (post-explosion regime).
class CollapsedBond : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qghjm
