#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <memory>

namespace sgl {

using Real = double;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using MatXi = Eigen::MatrixXi;
using SparseMat = Eigen::SparseMatrix<Real>;
using Triplet = Eigen::Triplet<Real>;

/// 2x2 symmetric positive definite metric tensor sampled at a chart point.
using MetricTensorFn = std::function<Mat2(const Vec2&)>;

/// Per-face Gaussian curvature sampled at the face barycenter.
using FaceScalarFn = std::function<Real(int)>;

struct MetricSurface;
using SurfacePtr = std::shared_ptr<const MetricSurface>;

constexpr Real kPi = 3.14159265358979323846;

} // namespace sgl
