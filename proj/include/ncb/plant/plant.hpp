#pragma once

#include <memory>
#include <string>

namespace ncb {

// Black-box discrete-time SISO plant. The output y is the only observable;
// step() advances exactly one tick, with d added on the output equation.
class Plant {
public:
    virtual ~Plant() = default;

    virtual double step(double u, double d = 0.0) = 0;
    virtual double output() const = 0;
    virtual void reset(double y0 = 0.0) = 0;

    // dy(k+1)/du(k) at the current state, for control value u.
    virtual double jacobian_du(double u) const = 0;

    virtual std::unique_ptr<Plant> clone() const = 0;
    virtual std::string name() const = 0;
};

// y(k+1) = a*y(k) + b*u(k) + d(k)
class LinearPlant final : public Plant {
public:
    LinearPlant(double a, double b);

    double step(double u, double d = 0.0) override;
    double output() const override { return y_; }
    void reset(double y0 = 0.0) override { y_ = y0; }
    double jacobian_du(double) const override { return b_; }
    std::unique_ptr<Plant> clone() const override { return std::make_unique<LinearPlant>(*this); }
    std::string name() const override;

    double a() const { return a_; }
    double b() const { return b_; }

    // Control that moves the undisturbed plant from y to target in one tick.
    double exact_inverse(double target, double y) const { return (target - a_ * y) / b_; }

private:
    double a_;
    double b_;
    double y_ = 0.0;
};

// y(k+1) = y(k)/(1 + y(k)^2) + 0.5*u(k) + 0.1*u(k)^3 + d(k)
class NonlinearPlant final : public Plant {
public:
    double step(double u, double d = 0.0) override;
    double output() const override { return y_; }
    void reset(double y0 = 0.0) override { y_ = y0; }
    double jacobian_du(double u) const override { return 0.5 + 0.3 * u * u; }
    std::unique_ptr<Plant> clone() const override { return std::make_unique<NonlinearPlant>(*this); }
    std::string name() const override { return "nonlinear1"; }

    // Next output for control u without advancing.
    double peek(double u) const;

private:
    double y_ = 0.0;
};

LinearPlant plant_linear1(double a, double b);
NonlinearPlant plant_nonlinear1();

}  // namespace ncb
