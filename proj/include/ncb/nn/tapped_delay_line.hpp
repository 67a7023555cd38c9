#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "ncb/error.hpp"

namespace ncb {

// Fixed-depth ring of recent samples, read newest-first. Slots that have not
// been written yet read as the fill value.
template <typename Scalar>
class TappedDelayLine {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit TappedDelayLine(std::size_t depth, Scalar fill_value = Scalar(0))
        : ring_(depth, fill_value), fill_(fill_value) {}

    void push(Scalar v) {
        ++pushes_;
        if (ring_.empty()) return;
        head_ = (head_ + 1) % ring_.size();
        ring_[head_] = v;
    }

    // i = 0 is the newest sample.
    Scalar operator[](std::size_t i) const {
        if (i >= ring_.size())
            throw ShapeError("delay line tap " + std::to_string(i) + " beyond depth " +
                             std::to_string(ring_.size()));
        return ring_[(head_ + ring_.size() - i) % ring_.size()];
    }

    Vector vector() const {
        Vector v(static_cast<Eigen::Index>(ring_.size()));
        for (std::size_t i = 0; i < ring_.size(); ++i) v[Eigen::Index(i)] = (*this)[i];
        return v;
    }

    void clear() {
        std::fill(ring_.begin(), ring_.end(), fill_);
        head_ = 0;
        pushes_ = 0;
    }

    std::size_t depth() const { return ring_.size(); }
    std::size_t pushes() const { return pushes_; }
    Scalar fill_value() const { return fill_; }

private:
    std::vector<Scalar> ring_;
    Scalar fill_;
    std::size_t head_ = 0;
    std::size_t pushes_ = 0;
};

using TappedDelayLined = TappedDelayLine<double>;

}  // namespace ncb
