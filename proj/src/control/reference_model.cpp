#include "ncb/control/reference_model.hpp"

#include "ncb/error.hpp"

namespace ncb {

ReferenceModel::ReferenceModel(double tau, double r_initial) : tau_(tau), r_current_(r_initial) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("reference model tau must lie in (0, 1]");
}

double ReferenceModel::step(double r) {
    r_current_ = (1.0 - tau_) * r_current_ + tau_ * r;
    return r_current_;
}

}  // namespace ncb
