#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace reach {

/// Row-major set of equal-length real vectors.
class VectorSet {
public:
    VectorSet() = default;
    explicit VectorSet(int dim);
    VectorSet(int dim, std::initializer_list<std::initializer_list<double>> rows);

    int dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_); }
    bool empty() const { return data_.empty(); }

    std::span<const double> operator[](std::size_t i) const {
        return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    std::span<double> operator[](std::size_t i) {
        return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }

    void push_back(std::span<const double> v);
    void pop_back() { data_.resize(data_.size() - static_cast<std::size_t>(dim_)); }
    void reserve(std::size_t rows) { data_.reserve(rows * static_cast<std::size_t>(dim_)); }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const VectorSet&) const = default;

private:
    int dim_ = 0;
    std::vector<double> data_;
};

} // namespace reach
