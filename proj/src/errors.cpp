#include "bidopt/errors.hpp"

#include <sstream>

namespace bidopt {

UnsatisfiableSupply::UnsatisfiableSupply(double target, double max_volume)
    : Error([&] {
        std::ostringstream os;
        os << "target volume " << target << " exceeds curve maximum " << max_volume;
        return os.str();
      }()),
      target_(target),
      max_volume_(max_volume) {}

InfeasibleInstance::InfeasibleInstance(const std::string& what, std::vector<std::string> campaigns)
    : Error([&] {
        std::string msg = what;
        if (!campaigns.empty()) {
          msg += " (campaigns:";
          for (const auto& c : campaigns) msg += " " + c;
          msg += ")";
        }
        return msg;
      }()),
      campaigns_(std::move(campaigns)) {}

OracleCapExceeded::OracleCapExceeded(double states, double cap)
    : Error([&] {
        std::ostringstream os;
        os << "enumeration needs about " << states << " states, above the cap of " << cap;
        return os.str();
      }()),
      states_(states),
      cap_(cap) {}

}  // namespace bidopt
