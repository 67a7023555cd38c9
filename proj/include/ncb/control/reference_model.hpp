#pragma once

namespace ncb {

// First-order lag r'(k+1) = (1 - tau) r'(k) + tau r(k), tau in (0, 1].
class ReferenceModel {
public:
    explicit ReferenceModel(double tau, double r_initial = 0.0);

    double step(double r);
    double current() const { return r_current_; }
    double tau() const { return tau_; }
    void reset(double r_initial = 0.0) { r_current_ = r_initial; }

private:
    double tau_;
    double r_current_;
};

inline double reference_step(ReferenceModel& model, double r) { return model.step(r); }

}  // namespace ncb
