#include "pacm/contour.hpp"

#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "pacm/core.hpp"

namespace pacm {

Eigen::VectorXd cell_to_point(const Grid& g, const Eigen::VectorXd& cell_field) {
  if (cell_field.size() != g.num_elems())
    throw ConfigError("cell_to_point: field size does not match element count");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.num_nodes());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(g.num_nodes());
  for (int e = 0; e < g.num_elems(); ++e) {
    for (int a = 0; a < 4; ++a) {
      out[g.conn[e][a]] += cell_field[e];
      count[g.conn[e][a]] += 1.0;
    }
  }
  return out.cwiseQuotient(count);
}

namespace {

struct Segment {
  int from_edge, to_edge;
  Eigen::Vector2d from_pt, to_pt;
};

}  // namespace

ContourSet extract_contour(const Grid& g, const Eigen::VectorXd& cell_field, double threshold) {
  ContourSet cs;
  cs.threshold = threshold;
  if ((cell_field.array() >= threshold).count() == 0) return cs;  // empty set, caller may warn

  const Eigen::VectorXd nodal = cell_to_point(g, cell_field);

  // Node grid padded with a one-cell void ring so boundary-touching solid
  // closes into loops.
  const int nx = g.nex + 3, ny = g.ney + 3;
  auto coord = [&](int i, int j) {
    return Eigen::Vector2d((i - 1) * g.dx, (j - 1) * g.dy);
  };
  auto value = [&](int i, int j) -> double {
    if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) return 0.0;
    return nodal[g.node_id(i - 1, j - 1)];
  };

  const int nh = (nx - 1) * ny;  // horizontal edge count
  auto hedge = [&](int i, int j) { return j * (nx - 1) + i; };
  auto vedge = [&](int i, int j) { return nh + j * nx + i; };

  auto cross = [&](int i0, int j0, int i1, int j1) {
    const double v0 = value(i0, j0), v1 = value(i1, j1);
    double t = (threshold - v0) / (v1 - v0);
    t = std::min(1.0, std::max(0.0, t));
    return (coord(i0, j0) * (1.0 - t) + coord(i1, j1) * t).eval();
  };

  std::vector<Segment> segs;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const bool b0 = value(i, j) >= threshold;
      const bool b1 = value(i + 1, j) >= threshold;
      const bool b2 = value(i + 1, j + 1) >= threshold;
      const bool b3 = value(i, j + 1) >= threshold;
      const int mask = (b0 ? 1 : 0) | (b1 ? 2 : 0) | (b2 ? 4 : 0) | (b3 ? 8 : 0);
      if (mask == 0 || mask == 15) continue;

      const int eb = hedge(i, j), er = vedge(i + 1, j), et = hedge(i, j + 1), el = vedge(i, j);
      const auto pb = cross(i, j, i + 1, j);
      const auto pr = cross(i + 1, j, i + 1, j + 1);
      const auto pt = cross(i, j + 1, i + 1, j + 1);
      const auto pl = cross(i, j, i, j + 1);
      auto add = [&](int fe, const Eigen::Vector2d& fp, int te, const Eigen::Vector2d& tp) {
        segs.push_back({fe, te, fp, tp});
      };

      // Segments oriented with the solid (>= threshold) side on the left.
      switch (mask) {
        case 1: add(eb, pb, el, pl); break;
        case 2: add(er, pr, eb, pb); break;
        case 4: add(et, pt, er, pr); break;
        case 8: add(el, pl, et, pt); break;
        case 14: add(el, pl, eb, pb); break;
        case 13: add(eb, pb, er, pr); break;
        case 11: add(er, pr, et, pt); break;
        case 7: add(et, pt, el, pl); break;
        case 3: add(er, pr, el, pl); break;
        case 12: add(el, pl, er, pr); break;
        case 6: add(et, pt, eb, pb); break;
        case 9: add(eb, pb, et, pt); break;
        case 5: {
          const double avg = 0.25 * (value(i, j) + value(i + 1, j) + value(i + 1, j + 1) + value(i, j + 1));
          if (avg >= threshold) {
            add(eb, pb, er, pr);
            add(et, pt, el, pl);
          } else {
            add(eb, pb, el, pl);
            add(et, pt, er, pr);
          }
          break;
        }
        case 10: {
          const double avg = 0.25 * (value(i, j) + value(i + 1, j) + value(i + 1, j + 1) + value(i, j + 1));
          if (avg >= threshold) {
            add(er, pr, et, pt);
            add(el, pl, eb, pb);
          } else {
            add(er, pr, eb, pb);
            add(el, pl, et, pt);
          }
          break;
        }
        default: break;
      }
    }
  }

  // Chain segments into closed loops; every crossed grid edge joins exactly
  // two cells, so each loop closes.
  std::unordered_map<int, int> seg_by_from;
  seg_by_from.reserve(segs.size() * 2);
  for (size_t s = 0; s < segs.size(); ++s) seg_by_from[segs[s].from_edge] = static_cast<int>(s);
  std::vector<char> used(segs.size(), 0);
  for (size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    std::vector<Eigen::Vector2d> loop;
    int cur = static_cast<int>(s0);
    while (!used[cur]) {
      used[cur] = 1;
      loop.push_back(segs[cur].from_pt);
      const auto it = seg_by_from.find(segs[cur].to_edge);
      if (it == seg_by_from.end())
        throw NumericalError("extract_contour: open contour chain (inconsistent case table)");
      cur = it->second;
    }
    loop.push_back(loop.front());
    cs.loops.push_back(std::move(loop));
  }
  return cs;
}

void write_polylines(const ContourSet& cs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("polylines: cannot write '" + path + "'");
  char buf[96];
  bool first = true;
  for (const auto& loop : cs.loops) {
    if (!first) out << "\n";
    first = false;
    for (const auto& p : loop) {
      std::snprintf(buf, sizeof buf, "%.12g %.12g\n", p.x(), p.y());
      out << buf;
    }
  }
  if (!out) throw IoError("polylines: write failed for '" + path + "'");
}

void write_dxf(const ContourSet& cs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("dxf: cannot write '" + path + "'");
  out << "0\nSECTION\n2\nENTITIES\n";
  char buf[96];
  for (const auto& loop : cs.loops) {
    out << "0\nPOLYLINE\n8\n0\n66\n1\n70\n1\n";
    for (const auto& p : loop) {
      std::snprintf(buf, sizeof buf, "0\nVERTEX\n8\n0\n10\n%.12g\n20\n%.12g\n", p.x(), p.y());
      out << buf;
    }
    out << "0\nSEQEND\n";
  }
  out << "0\nENDSEC\n0\nEOF\n";
  if (!out) throw IoError("dxf: write failed for '" + path + "'");
}

}  // namespace pacm
