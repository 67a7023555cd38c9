#include "ncb/plant/plant.hpp"

#include <sstream>

#include "ncb/error.hpp"

namespace ncb {

LinearPlant::LinearPlant(double a, double b) : a_(a), b_(b) {
    if (b == 0.0) throw ConfigError("linear plant with b = 0 is uncontrollable");
}

double LinearPlant::step(double u, double d) {
    y_ = a_ * y_ + b_ * u + d;
    return y_;
}

std::string LinearPlant::name() const {
    std::ostringstream os;
    os << "linear1(a=" << a_ << ", b=" << b_ << ")";
    return os.str();
}

double NonlinearPlant::peek(double u) const {
    return y_ / (1.0 + y_ * y_) + 0.5 * u + 0.1 * u * u * u;
}

double NonlinearPlant::step(double u, double d) {
    y_ = peek(u) + d;
    return y_;
}

LinearPlant plant_linear1(double a, double b) { return LinearPlant(a, b); }

NonlinearPlant plant_nonlinear1() { return NonlinearPlant{}; }

}  // namespace ncb
