// Copyright 2026 The qksvm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Dense row-major real matrix used for datasets, Gram matrices and
 * document-term counts.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qksvm {

class RealMatrix {
  public:
    RealMatrix() = default;
    RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double& at(std::size_t r, std::size_t c) {
        check(r, c);
        return data_[r * cols_ + c];
    }
    double at(std::size_t r, std::size_t c) const {
        check(r, c);
        return data_[r * cols_ + c];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    /// Returns row r as a copied vector.
    std::vector<double> row(std::size_t r) const {
        check(r, 0);
        return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
    }

    /// Sub-matrix with the given rows and columns, in the given order.
    RealMatrix submatrix(const std::vector<std::size_t>& row_idx,
                         const std::vector<std::size_t>& col_idx) const {
        RealMatrix out(row_idx.size(), col_idx.size());
        for (std::size_t i = 0; i < row_idx.size(); ++i) {
            for (std::size_t j = 0; j < col_idx.size(); ++j) {
                out(i, j) = at(row_idx[i], col_idx[j]);
            }
        }
        return out;
    }

    /// Keeps only the listed rows (all columns), in the given order.
    RealMatrix select_rows(const std::vector<std::size_t>& row_idx) const {
        RealMatrix out(row_idx.size(), cols_);
        for (std::size_t i = 0; i < row_idx.size(); ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                out(i, j) = at(row_idx[i], j);
            }
        }
        return out;
    }

    /// Keeps only the listed columns (all rows), in the given order.
    RealMatrix select_columns(const std::vector<std::size_t>& col_idx) const {
        RealMatrix out(rows_, col_idx.size());
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < col_idx.size(); ++j) {
                out(i, j) = at(i, col_idx[j]);
            }
        }
        return out;
    }

    bool operator==(const RealMatrix& other) const = default;

  private:
    void check(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_) {
            throw std::out_of_range("RealMatrix: index out of range");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace qksvm
