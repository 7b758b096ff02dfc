/* Copyright 2026 The occmatch Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Planar geometry shared by the simulator, the losses and the metrics.
// Everything is double precision and value-typed.

#ifndef OCCMATCH_GEOM_HPP_
#define OCCMATCH_GEOM_HPP_

#include <array>
#include <cmath>
#include <optional>

namespace occmatch {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double k, Point2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double Dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double Cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double Norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double Distance(Point2 a, Point2 b) { return Norm(a - b); }

// Unit heading vector (cos, sin). Construct through NormalizeHeading or
// FromAngle; the aggregate form is for values already known to be unit.
struct HeadingVec {
  double c = 1.0;
  double s = 0.0;

  static HeadingVec FromAngle(double theta) {
    return {std::cos(theta), std::sin(theta)};
  }
  double Angle() const { return std::atan2(s, c); }
  HeadingVec Inverse() const { return {c, -s}; }
  friend bool operator==(HeadingVec a, HeadingVec b) = default;
};

struct Segment2 {
  Point2 a;
  Point2 b;
};

// Throws Error(kDegenerateHeading) when both components are within 1e-12
// of zero.
HeadingVec NormalizeHeading(double raw_c, double raw_s);

// Rotates a vehicle-frame displacement into the global frame.
inline Point2 RotateLocalToGlobal(Point2 d_local, HeadingVec h) {
  return {h.c * d_local.x - h.s * d_local.y, h.s * d_local.x + h.c * d_local.y};
}

inline Point2 RotateGlobalToLocal(Point2 d_global, HeadingVec h) {
  return RotateLocalToGlobal(d_global, h.Inverse());
}

inline HeadingVec Compose(HeadingVec a, HeadingVec b) {
  return {a.c * b.c - a.s * b.s, a.s * b.c + a.c * b.s};
}

// Smallest t >= 0 with origin + t * dir on seg. Colinear overlap returns the
// distance to the nearest overlapping point.
std::optional<double> RaySegmentIntersect(Point2 origin, HeadingVec dir,
                                          const Segment2& seg);

// 1 - a.b, in [0, 2].
inline double HeadingCosineGap(HeadingVec a, HeadingVec b) {
  return 1.0 - (a.c * b.c + a.s * b.s);
}

// Oriented rectangle, used for agent footprints and buildings.
struct OrientedBox {
  Point2 center;
  HeadingVec heading;
  double length = 0.0;
  double width = 0.0;

  std::array<Point2, 4> Corners() const;
  std::array<Segment2, 4> Edges() const;
  bool Contains(Point2 p) const;
};

// True when the closed segments intersect (including touching).
bool SegmentsIntersect(const Segment2& s, const Segment2& t);

}  // namespace occmatch

#endif  // OCCMATCH_GEOM_HPP_
