#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "pacm/config.hpp"
#include "pacm/contour.hpp"
#include "pacm/vtk.hpp"

using namespace pacm;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "pacm_tests";
  fs::create_directories(dir);
  return dir / name;
}

double loop_area(const std::vector<Eigen::Vector2d>& loop) {
  double a = 0.0;
  for (size_t i = 0; i + 1 < loop.size(); ++i)
    a += loop[i].x() * loop[i + 1].y() - loop[i + 1].x() * loop[i].y();
  return 0.5 * a;
}

}  // namespace

TEST_CASE("empty config yields the reference defaults") {
  const RunConfig c = parse_config_text("");
  CHECK(c.p_in == doctest::Approx(1e5));
  CHECK(c.zeta == doctest::Approx(3.0));
  CHECK(c.eta_kappa == doctest::Approx(0.3));
  CHECK(c.beta_kappa == doctest::Approx(10.0));
  CHECK(c.eta_d == doctest::Approx(0.2));
  CHECK(c.beta_d == doctest::Approx(10.0));
  CHECK(c.k_v == doctest::Approx(1.0));
  CHECK(c.flow_contrast == doctest::Approx(1e-7));
  CHECK(c.drain_remainder == doctest::Approx(0.1));
  CHECK(c.move_limit == doctest::Approx(0.1));
  CHECK(c.e1 == doctest::Approx(3e9));
  CHECK(c.nu == doctest::Approx(0.40));
  CHECK(c.thickness == doctest::Approx(1e-3));
  CHECK(c.e0_ratio == doctest::Approx(1e-6));
  CHECK(c.spring_stiffness == doctest::Approx(1e4));
  CHECK(c.volfrac == doctest::Approx(0.2));
  CHECK(c.max_iter == 400);
  CHECK(c.beta_max == doctest::Approx(128.0));
}

TEST_CASE("invalid values are rejected with the offending key named") {
  CHECK_THROWS_WITH_AS(parse_config_text("delta_eta = 0.7\n"),
                       doctest::Contains("delta_eta"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("volfrac = nonsense\n"),
                       doctest::Contains("volfrac"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("made_up_key = 1\n"),
                       doctest::Contains("made_up_key"), ConfigError);
}

TEST_CASE("filter radius accepts h-multiples and absolute meters") {
  const RunConfig c = parse_config_text("rfill = 5.4h\n");
  const Grid g = c.make_grid();  // 200x100 over 0.2x0.1: h = 0.001
  CHECK(c.rfill.absolute(g) == doctest::Approx(0.0054));
  const RunConfig c2 = parse_config_text("rfill = 0.0054\n");
  CHECK(c2.rfill.absolute(g) == doctest::Approx(0.0054));
}

TEST_CASE("config round-trips losslessly") {
  RunConfig c;
  c.preset = PresetKind::Contractor;
  c.nex = 123;
  c.ney = 45;
  c.lx = 0.271;
  c.ly = 0.1313;
  c.volfrac = 0.271828;
  c.delta_eta = 0.0721;
  c.rfill = {false, 0.00734};
  c.mu = 917.3;
  c.p_in = 1.23e5;
  c.output_x = 0.1;
  c.output_y = 0.02;
  c.output_comp = 1;
  c.output_dir = 1.0;
  c.passive_solid_rects = "0.01,0.01,0.02,0.03";
  const RunConfig r = parse_config_text(serialize_config(c));
  CHECK(r.preset == c.preset);
  CHECK(r.nex == c.nex);
  CHECK(r.ney == c.ney);
  CHECK(r.lx == c.lx);
  CHECK(r.ly == c.ly);
  CHECK(r.volfrac == c.volfrac);
  CHECK(r.delta_eta == c.delta_eta);
  CHECK(r.rfill.multiple_of_h == c.rfill.multiple_of_h);
  CHECK(r.rfill.value == c.rfill.value);
  CHECK(r.mu == c.mu);
  CHECK(r.p_in == c.p_in);
  CHECK(r.output_x == c.output_x);
  CHECK(r.output_comp == c.output_comp);
  CHECK(r.passive_solid_rects == c.passive_solid_rects);
  CHECK(serialize_config(r) == serialize_config(c));
}

TEST_CASE("vtk structured export round-trips cell and point data") {
  const Grid g = build_grid(1, 1, 0.01, 0.01, 1e-3);
  VtkFields f;
  f.cell_scalars["rho_intermediate"] = Eigen::VectorXd::Ones(1);
  const auto path = temp_file("one_cell.vtk");
  write_vtk_structured(g, f, path.string());
  const auto data = pacm::test::read_vtk(path.string());
  REQUIRE(data.cell_scalars.count("rho_intermediate") == 1);
  REQUIRE(data.cell_scalars.at("rho_intermediate").size() == 1);
  CHECK(data.cell_scalars.at("rho_intermediate")[0] == 1.0);
  CHECK(data.points.size() == 4);
}

TEST_CASE("vtk export preserves twelve significant digits") {
  const Grid g = build_grid(5, 4, 0.1, 0.08, 1e-3);
  VtkFields f;
  f.cell_scalars["rho_intermediate"] = pacm::test::random_vector(g.num_elems(), 0.0, 1.0, 401);
  f.point_scalars["pressure"] = pacm::test::random_vector(g.num_nodes(), 0.0, 1e5, 402);
  Eigen::VectorXd disp = pacm::test::random_vector(g.num_disp_dofs(), -1e-3, 1e-3, 403);
  f.point_vectors["displacement"] = disp;
  const auto path = temp_file("fields.vtk");
  write_vtk_structured(g, f, path.string());
  const auto data = pacm::test::read_vtk(path.string());
  for (int e = 0; e < g.num_elems(); ++e)
    CHECK(data.cell_scalars.at("rho_intermediate")[e] ==
          doctest::Approx(f.cell_scalars["rho_intermediate"][e]).epsilon(1e-12));
  for (int n = 0; n < g.num_nodes(); ++n) {
    CHECK(data.point_scalars.at("pressure")[n] ==
          doctest::Approx(f.point_scalars["pressure"][n]).epsilon(1e-12));
    CHECK(data.point_vectors.at("displacement")[n][0] ==
          doctest::Approx(disp[2 * n]).epsilon(1e-12));
    CHECK(data.point_vectors.at("displacement")[n][1] ==
          doctest::Approx(disp[2 * n + 1]).epsilon(1e-12));
  }
}

TEST_CASE("cell-to-point conversion averages adjacent cells") {
  const Grid g = build_grid(2, 2, 0.2, 0.2, 1e-3);
  Eigen::VectorXd cells(4);
  cells << 1.0, 2.0, 3.0, 4.0;
  const Eigen::VectorXd pts = cell_to_point(g, cells);
  CHECK(pts[g.node_id(1, 1)] == doctest::Approx(2.5));   // interior: mean of all four
  CHECK(pts[g.node_id(0, 0)] == doctest::Approx(1.0));   // corner: single cell
  CHECK(pts[g.node_id(1, 0)] == doctest::Approx(1.5));   // edge: mean of two
  CHECK(pts[g.node_id(2, 1)] == doctest::Approx(3.0));
}

TEST_CASE("contour of a single solid cell is one CCW loop around it") {
  const Grid g = build_grid(3, 3, 0.3, 0.3, 1e-3);
  Eigen::VectorXd cells = Eigen::VectorXd::Zero(9);
  cells[4] = 1.0;  // center cell
  // Node averaging caps a lone cell's node values at 0.25, so trace the loop
  // around its support region below that level.
  const ContourSet cs = extract_contour(g, cells, 0.2);
  REQUIRE(cs.loops.size() == 1);
  const auto& loop = cs.loops[0];
  CHECK(loop.front() == loop.back());
  CHECK(loop_area(loop) > 0.0);  // solid on the left means CCW around solid
  // The loop surrounds the solid cell's center.
  const Eigen::Vector2d center = g.elem_center(4);
  double minx = 1e30, maxx = -1e30, miny = 1e30, maxy = -1e30;
  for (const auto& p : loop) {
    minx = std::min(minx, p.x());
    maxx = std::max(maxx, p.x());
    miny = std::min(miny, p.y());
    maxy = std::max(maxy, p.y());
  }
  CHECK(minx < center.x());
  CHECK(maxx > center.x());
  CHECK(miny < center.y());
  CHECK(maxy > center.y());
}

TEST_CASE("uniform solid field produces one closed rectangle near the boundary") {
  const Grid g = build_grid(6, 4, 0.3, 0.2, 1e-3);
  const ContourSet cs = extract_contour(g, Eigen::VectorXd::Ones(g.num_elems()), 0.85);
  REQUIRE(cs.loops.size() == 1);
  CHECK(cs.loops[0].front() == cs.loops[0].back());
  CHECK(loop_area(cs.loops[0]) > 0.0);
  for (const auto& p : cs.loops[0]) {
    CHECK(p.x() > -g.dx);
    CHECK(p.x() < g.lx + g.dx);
    CHECK(p.y() > -g.dy);
    CHECK(p.y() < g.ly + g.dy);
  }
}

TEST_CASE("sharp half-solid split yields a vertical contour near the midline") {
  const Grid g = build_grid(10, 4, 0.2, 0.08, 1e-3);
  Eigen::VectorXd cells(g.num_elems());
  for (int e = 0; e < g.num_elems(); ++e)
    cells[e] = g.elem_center(e).x() < 0.1 ? 1.0 : 0.0;
  const ContourSet cs = extract_contour(g, cells, 0.85);
  REQUIRE(cs.loops.size() == 1);
  // Vertical section: points strictly inside the domain in y must sit within
  // a cell of the midline.
  int interior_points = 0;
  for (const auto& p : cs.loops[0]) {
    if (p.y() > g.dy / 2 && p.y() < g.ly - g.dy / 2 && p.x() > g.dx && p.x() < g.lx - g.dx) {
      CHECK(std::abs(p.x() - 0.1) <= 0.75 * g.dx);
      ++interior_points;
    }
  }
  CHECK(interior_points > 0);
}

TEST_CASE("empty field produces an empty contour set") {
  const Grid g = build_grid(4, 4, 0.2, 0.2, 1e-3);
  const ContourSet cs = extract_contour(g, Eigen::VectorXd::Zero(g.num_elems()), 0.85);
  CHECK(cs.loops.empty());
}

TEST_CASE("polyline and dxf writers emit all loops") {
  const Grid g = build_grid(5, 5, 0.25, 0.25, 1e-3);
  Eigen::VectorXd cells = Eigen::VectorXd::Zero(g.num_elems());
  cells[g.elem_id(1, 1)] = 1.0;
  cells[g.elem_id(3, 3)] = 1.0;  // two disjoint blobs
  const ContourSet cs = extract_contour(g, cells, 0.2);
  REQUIRE(cs.loops.size() == 2);

  const auto txt = temp_file("contour.txt");
  write_polylines(cs, txt.string());
  std::ifstream in(txt.string());
  std::string line;
  int blank = 0, vertices = 0;
  while (std::getline(in, line)) {
    if (line.empty()) ++blank;
    else ++vertices;
  }
  CHECK(blank == 1);  // loop separator
  size_t expect = cs.loops[0].size() + cs.loops[1].size();
  CHECK(vertices == static_cast<int>(expect));

  const auto dxf = temp_file("contour.dxf");
  write_dxf(cs, dxf.string());
  std::ifstream din(dxf.string());
  std::string all((std::istreambuf_iterator<char>(din)), std::istreambuf_iterator<char>());
  CHECK(all.find("POLYLINE") != std::string::npos);
  CHECK(all.find("EOF") != std::string::npos);
}

TEST_CASE("unstructured vtk writer supports magnified deformation") {
  std::vector<double> xs = {0, 1, 1, 0}, ys = {0, 0, 1, 1};
  std::vector<std::array<int, 4>> conn = {{0, 1, 2, 3}};
  VtkFields f;
  Eigen::VectorXd disp(8);
  disp << 0, 0, 0.01, 0, 0.01, 0, 0, 0;
  f.point_vectors["displacement"] = disp;
  const auto path = temp_file("deformed.vtk");
  write_vtk_unstructured(xs, ys, conn, f, path.string(), 50.0);
  const auto data = pacm::test::read_vtk(path.string());
  CHECK(data.points[1][0] == doctest::Approx(1.0 + 50.0 * 0.01));
  CHECK(data.points[0][0] == doctest::Approx(0.0));
}
