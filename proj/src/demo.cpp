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


#include "occmatch/demo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "occmatch/assign.hpp"

namespace occmatch {

namespace {

class Svg {
 public:
  Svg(double width, double height) {
    Append("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
           "viewBox=\"0 0 %.0f %.0f\">\n",
           width, height, width, height);
    Append("<rect x=\"0\" y=\"0\" width=\"%.0f\" height=\"%.0f\" fill=\"#ffffff\"/>\n", width,
           height);
  }

  template <typename... Args>
  void Append(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    out_ += buf;
  }

  void Text(double x, double y, const std::string& s, const char* anchor = "start",
            int size = 12) {
    Append("<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"%d\" "
           "text-anchor=\"%s\">",
           x, y, size, anchor);
    out_ += s;
    out_ += "</text>\n";
  }

  void Rect(double x, double y, double w, double h, const char* fill,
            const char* extra = "") {
    Append("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\" %s/>\n", x, y,
           w, h, fill, extra);
  }

  void Polygon(const std::vector<Point2>& pts, const char* style) {
    out_ += "<polygon points=\"";
    AppendPoints(pts);
    out_ += "\" ";
    out_ += style;
    out_ += "/>\n";
  }

  void Polyline(const std::vector<Point2>& pts, const char* style) {
    out_ += "<polyline points=\"";
    AppendPoints(pts);
    out_ += "\" fill=\"none\" ";
    out_ += style;
    out_ += "/>\n";
  }

  std::string Finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  void AppendPoints(const std::vector<Point2>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Append(i == 0 ? "%.2f,%.2f" : " %.2f,%.2f", pts[i].x, pts[i].y);
    }
  }

  std::string out_;
};

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

ClassLogits LogitsForCarProbability(double p) {
  const double rest = std::log((1.0 - p) / 3.0);
  return {std::log(p), rest, rest, rest};
}

// White at 0, deep red at 1.
std::string OccupancyColor(double p) {
  const int gb = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(p, 0.0, 1.0))));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", 255 - gb / 4, gb, gb);
  return buf;
}

}  // namespace

PredictionSet CostFlipPredictions() {
  PredictionSet preds = PredictionSet::Zeros({{0.0, 0.0}, {0.0, 1.5}}, 1, 1);
  preds.class_logits[0] = LogitsForCarProbability(0.2);
  preds.class_logits[1] = LogitsForCarProbability(0.9);
  for (auto& h : preds.heading_raw) h = {1.0, 0.0};
  return preds;
}

std::vector<GroundTruth> CostFlipGroundTruth() {
  GroundTruth car;
  car.cls = AgentClass::kCar;
  car.position = {0.0, 0.0};
  car.future.assign(1, {0.0, 0.0});
  return {car};
}

CostFlipReport RunCostFlip(std::span<const double> lambda_class_values, double lambda_pos) {
  const PredictionSet preds = CostFlipPredictions();
  const auto gts = CostFlipGroundTruth();
  CostFlipReport report;
  for (double lambda_class : lambda_class_values) {
    const CostMatrix cost = BuildCostMatrix(preds, gts, lambda_pos, lambda_class);
    const Assignment a = HungarianSolve(cost);
    CostFlipRow row;
    row.lambda_pos = lambda_pos;
    row.lambda_class = lambda_class;
    row.cost_a = cost(0, 0);
    row.cost_b = cost(0, 1);
    row.matched = a.PredictionForGroundTruth(1)[0];
    report.rows.push_back(row);
  }
  return report;
}

std::string CostFlipReport::ToText() const {
  std::string out = "lambda_pos,lambda_class,cost_a,cost_b,matched\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%s\n", r.lambda_pos, r.lambda_class,
                  r.cost_a, r.cost_b, r.matched == 0 ? "A" : "B");
    out += buf;
  }
  return out;
}

std::string RenderCostFlipSvg(const CostFlipReport& report) {
  const double panel = 220.0;
  Svg svg(panel * std::max<std::size_t>(report.rows.size(), 1), 240.0);
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const auto& r = report.rows[k];
    const double ox = panel * k;
    const double cx = ox + panel / 2;
    // 40 px per metre, car centred at y = 150.
    svg.Rect(cx - 38, 150 - 18, 76, 36, "#9ecae1", "stroke=\"#08519c\"");
    const double ys[2] = {150.0, 150.0 - 1.5 * 40.0};
    const double probs[2] = {0.2, 0.9};
    const char* names[2] = {"A", "B"};
    for (int i = 0; i < 2; ++i) {
      const bool hit = r.matched == i;
      svg.Append("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"7\" fill=\"%s\" stroke=\"%s\" "
                 "stroke-width=\"%d\"/>\n",
                 cx, ys[i], OccupancyColor(probs[i]).c_str(), hit ? "#000000" : "#969696",
                 hit ? 3 : 1);
      svg.Text(cx + 12, ys[i] + 4, std::string(names[i]) + " p=" + Fmt("%.1f", probs[i]) +
                                        " c=" + Fmt("%.2f", i == 0 ? r.cost_a : r.cost_b));
    }
    svg.Text(cx, 24, "lambda_class = " + Fmt("%.1f", r.lambda_class), "middle", 14);
    svg.Text(cx, 44, std::string("matched: ") + (r.matched == 0 ? "A" : "B"), "middle");
  }
  return svg.Finish();
}

std::string RenderLossCasesSvg(const LossCaseReport& report) {
  const double width = 640.0;
  const double height = 320.0;
  const double base = 260.0;
  Svg svg(width, height);
  double top = 0.0;
  for (const auto& c : report.cases) top = std::max({top, c.with_matching, c.without_matching});
  const double scale = top > 0.0 ? 200.0 / top : 1.0;
  const double group = width / std::max<std::size_t>(report.cases.size(), 1);
  for (std::size_t k = 0; k < report.cases.size(); ++k) {
    const auto& c = report.cases[k];
    const double gx = group * k + group / 2;
    const double hw = c.with_matching * scale;
    const double hwo = c.without_matching * scale;
    svg.Rect(gx - 44, base - hw, 40, hw, "#3182bd");
    svg.Rect(gx + 4, base - hwo, 40, hwo, "#de2d26");
    svg.Text(gx - 24, base - hw - 4, Fmt("%.2f", c.with_matching), "middle", 10);
    svg.Text(gx + 24, base - hwo - 4, Fmt("%.2f", c.without_matching), "middle", 10);
    svg.Text(gx, base + 20, "(" + c.name + ")", "middle", 14);
  }
  svg.Append("<line x1=\"0\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#000000\"/>\n", base,
             width, base);
  svg.Rect(12, 12, 12, 12, "#3182bd");
  svg.Text(30, 22, "with matching");
  svg.Rect(142, 12, 12, 12, "#de2d26");
  svg.Text(160, 22, "without matching");
  return svg.Finish();
}

std::string RenderSceneSvg(const ScenePrediction& prediction, double occupancy_threshold) {
  const PreparedScene& p = prediction.prepared;
  const Grid& grid = p.mask.grid;
  const Bounds& r = grid.region;
  const double px = 10.0;
  const double width = (r.max_x - r.min_x) * px;
  const double height = (r.max_y - r.min_y) * px;
  auto map = [&](Point2 q) { return Point2{(q.x - r.min_x) * px, (r.max_y - q.y) * px}; };
  Svg svg(width, height);

  const auto& visible = p.mask.cell_visible[kPredictionStep];
  for (int cell = 0; cell < grid.CellCount(); ++cell) {
    if (visible[cell]) continue;
    const Point2 c = map(grid.CellCenter(cell));
    const double s = grid.resolution * px;
    svg.Rect(c.x - s / 2, c.y - s / 2, s, s, "#d9d9d9");
  }
  for (const auto& seg : p.scene.static_obstacles) {
    const Point2 a = map(seg.a);
    const Point2 b = map(seg.b);
    svg.Append("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#252525\" "
               "stroke-width=\"3\"/>\n",
               a.x, a.y, b.x, b.y);
  }
  for (std::size_t i = 0; i < p.scene.agents.size(); ++i) {
    const auto& agent = p.scene.agents[i];
    std::vector<Point2> pts;
    for (const Point2& q : agent.FootprintAt(kPredictionStep).Corners()) pts.push_back(map(q));
    const bool hidden = i < p.gts.size() && p.gts[i].occluded;
    svg.Polygon(pts, hidden ? "fill=\"none\" stroke=\"#08519c\" stroke-dasharray=\"4,3\""
                            : "fill=\"#9ecae1\" stroke=\"#08519c\"");
    std::vector<Point2> future;
    for (int step = kHistorySteps; step < kTotalSteps; ++step) {
      future.push_back(map(agent.states[step].position));
    }
    svg.Polyline(future, "stroke=\"#2ca25f\" stroke-width=\"1\"");
  }
  const auto& preds = prediction.preds;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    const double occ = prediction.occupancy[n];
    const Point2 c = map(preds.anchors[n]);
    svg.Append("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\" stroke=\"#bdbdbd\" "
               "stroke-width=\"0.5\"/>\n",
               c.x, c.y, OccupancyColor(occ).c_str());
  }
  for (std::size_t n = 0; n < preds.size(); ++n) {
    if (prediction.occupancy[n] <= occupancy_threshold) continue;
    const auto logits = preds.ModeLogits(n);
    const auto best = static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    const auto modes = GlobalModes(preds, n);
    std::vector<Point2> pts = {map(preds.Position(n))};
    for (const Point2& q : modes[best]) pts.push_back(map(q));
    svg.Polyline(pts, "stroke=\"#cb181d\" stroke-width=\"1.5\"");
  }
  const Point2 ego = map(p.scene.ego_position);
  const Point2 nose = map(p.scene.ego_position + 2.5 * Point2{p.scene.ego_heading.c, p.scene.ego_heading.s});
  svg.Append("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"5\" fill=\"#000000\"/>\n", ego.x, ego.y);
  svg.Append("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#000000\" "
             "stroke-width=\"2\"/>\n",
             ego.x, ego.y, nose.x, nose.y);
  return svg.Finish();
}

}  // namespace occmatch
