#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace ppkde::kde {

struct DataTuple {
    std::vector<double> features;
    int label = 0;
};

struct Dataset {
    std::vector<DataTuple> tuples;
    int dims = 0;
    int classes = 0;
    std::vector<double> class_weights;  // empty means all 1.0

    double weight(int label) const {
        return class_weights.empty() ? 1.0 : class_weights.at(size_t(label));
    }
    void add(DataTuple t);
    void check_point(std::span<const double> q) const;
};

using ClassScores = std::vector<double>;

/// (1/(sigma sqrt(2 pi))) e^(-dist^2 / (2 sigma^2)), dist >= 0.
double gaussian_kernel(double dist, double sigma);

/// 1 / (e^u + 2 + e^-u); symmetric, peak 1/4 at zero.
double logistic_kernel(double u);

double l2_distance(std::span<const double> a, std::span<const double> b);

/// Per-class Gaussian kernel sums, optionally class-weighted.
ClassScores kde_scores(const Dataset& data, std::span<const double> q, double sigma);

/// argmax of kde_scores; ties to the lowest class index.
int kde_classify(const Dataset& data, std::span<const double> q, double sigma);

/// k nearest tuples sorted by ascending distance; equal distances
/// resolve to the lower tuple index.
std::vector<std::pair<size_t, double>> knn_neighbors(const Dataset& data,
                                                     std::span<const double> q, int k);

int knn_classify_majority(const Dataset& data, std::span<const double> q, int k);

/// The labels (with multiplicity) of the k nearest tuples.
std::vector<int> knn_classify_all(const Dataset& data, std::span<const double> q, int k);

/// Per-class sums under the k-NN uniform kernel of width d_k (distance
/// of the k-th nearest point): each neighbor within the width
/// contributes 1/(2 d_k).
ClassScores uniform_kernel_scores(const Dataset& data, std::span<const double> q, int k);

int argmax_lowest(std::span<const double> scores);

}  // namespace ppkde::kde
