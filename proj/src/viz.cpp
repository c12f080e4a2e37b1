#include "weftsched/viz.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

namespace weftsched {

namespace {

constexpr std::array<const char*, 8> kPalette = {
    "#8ecae6", "#ffb4a2", "#b7e4c7", "#ffd166",
    "#cdb4db", "#f4a261", "#90be6d", "#e5989b"};

const char* warp_color(int warp) {
  return kPalette[static_cast<std::size_t>(warp) % kPalette.size()];
}

std::string num(std::int64_t x) { return std::to_string(x); }

std::int64_t eff_cycles(const Node& n) {
  return std::max<std::int64_t>(1, n.rrt.cycles);
}

}  // namespace

std::string emit_dot(const DepGraph& g, const JointSolution* sol) {
  std::string s;
  s += "digraph deps {\n";
  s += "  rankdir=LR;\n";
  s += "  node [shape=box, style=filled, fillcolor=\"#f0f0f0\", fontname=\"monospace\"];\n";
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    s += "  \"" + g.nodes[v].id + "\" [";
    if (g.nodes[v].variable_latency) s += "shape=diamond, ";
    if (sol && v < sol->warp_start.size())
      s += "fillcolor=\"" + std::string(warp_color(sol->warp_start[v])) + "\"";
    else
      s += "fillcolor=\"#f0f0f0\"";
    s += "];\n";
  }
  for (const Edge& e : g.edges) {
    s += "  \"" + g.nodes[static_cast<std::size_t>(e.src)].id + "\" -> \"" +
         g.nodes[static_cast<std::size_t>(e.dst)].id + "\"";
    std::string attrs;
    if (e.delta > 0) {
      attrs += "style=dashed, label=\"delta=" + num(e.delta) + "\"";
    }
    if (e.blocking) {
      if (!attrs.empty()) attrs += ", ";
      attrs += "penwidth=2";
    }
    if (!attrs.empty()) s += " [" + attrs + "]";
    s += ";\n";
  }
  s += "}\n";
  return s;
}

std::string emit_gantt(const JointSolution& sol, const DepGraph& g,
                       const MachineDesc& m) {
  constexpr std::int64_t kLabelW = 96;
  constexpr std::int64_t kCellW = 40;
  constexpr std::int64_t kCellH = 24;
  constexpr std::int64_t kTop = 28;

  if (g.nodes.empty()) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           num(kLabelW + 8) + "\" height=\"" + num(kTop + 8) + "\"></svg>\n";
  }

  const std::int64_t horizon = sol.horizon;
  const std::int64_t ii = sol.schedule.initiation_interval;
  const std::int64_t pro_end = (sol.copies - 1) * ii;
  const std::int64_t steady_end = pro_end + ii;
  const std::int64_t rows =
      static_cast<std::int64_t>(m.units.size()) + m.num_warps;
  const std::int64_t width = kLabelW + horizon * kCellW + 8;
  const std::int64_t height = kTop + rows * kCellH + 8;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
       "\" height=\"" + num(height) + "\" font-family=\"monospace\" font-size=\"12\">\n";

  auto band = [&](std::int64_t from, std::int64_t to, const char* fill) {
    if (from >= to) return;
    s += "  <rect x=\"" + num(kLabelW + from * kCellW) + "\" y=\"" + num(kTop) +
         "\" width=\"" + num((to - from) * kCellW) + "\" height=\"" +
         num(rows * kCellH) + "\" fill=\"" + fill + "\"/>\n";
  };
  band(0, pro_end, "#f7f7f7");
  band(pro_end, std::min(steady_end, horizon), "#eaf3fb");
  band(std::min(steady_end, horizon), horizon, "#f7f7f7");
  if (pro_end < steady_end && pro_end < horizon) {
    s += "  <rect x=\"" + num(kLabelW + pro_end * kCellW) + "\" y=\"" +
         num(kTop) + "\" width=\"" +
         num((std::min(steady_end, horizon) - pro_end) * kCellW) +
         "\" height=\"" + num(rows * kCellH) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-dasharray=\"4 2\"/>\n";
  }

  for (std::int64_t t = 0; t < horizon; ++t)
    s += "  <text x=\"" + num(kLabelW + t * kCellW + kCellW / 2) +
         "\" y=\"18\" text-anchor=\"middle\">" + num(t) + "</text>\n";

  auto row_label = [&](std::int64_t row, const std::string& label) {
    s += "  <text x=\"4\" y=\"" + num(kTop + row * kCellH + 16) + "\">" + label +
         "</text>\n";
  };
  for (std::size_t f = 0; f < m.units.size(); ++f)
    row_label(static_cast<std::int64_t>(f), m.units[f].name);
  for (int w = 0; w < m.num_warps; ++w)
    row_label(static_cast<std::int64_t>(m.units.size()) + w, "warp " + num(w));

  auto box = [&](std::int64_t row, std::int64_t t, std::int64_t span,
                 const char* fill, const std::string& label) {
    s += "  <rect x=\"" + num(kLabelW + t * kCellW + 1) + "\" y=\"" +
         num(kTop + row * kCellH + 1) + "\" width=\"" + num(span * kCellW - 2) +
         "\" height=\"" + num(kCellH - 2) + "\" fill=\"" + fill +
         "\" stroke=\"#333333\"/>\n";
    s += "  <text x=\"" + num(kLabelW + t * kCellW + 5) + "\" y=\"" +
         num(kTop + row * kCellH + 17) + "\">" + label + "</text>\n";
  };

  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const Node& nd = g.nodes[v];
    const int warp = v < sol.warp_start.size() ? sol.warp_start[v] : 0;
    const int wr = std::max(1, nd.warps_required);
    const char* fill = warp_color(warp);
    for (std::int64_t c = 0; c < sol.copies; ++c) {
      const std::int64_t t = sol.schedule.assignments[v] + c * ii;
      const std::int64_t span = std::min(eff_cycles(nd), horizon - t);
      if (t < 0 || t >= horizon) continue;
      const std::string label = c == 0 ? nd.id : nd.id + "#" + num(c);
      for (std::size_t f = 0; f < nd.rrt.use.size() && f < m.units.size(); ++f) {
        bool busy = false;
        for (std::int64_t u : nd.rrt.use[f]) busy = busy || u > 0;
        if (busy) box(static_cast<std::int64_t>(f), t, span, fill, label);
      }
      for (int w = warp; w < warp + wr && w < m.num_warps; ++w)
        box(static_cast<std::int64_t>(m.units.size()) + w, t, span, fill, label);
    }
  }

  s += "</svg>\n";
  return s;
}

}  // namespace weftsched
