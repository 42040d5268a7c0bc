#include "arcenv/render.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include <fmt/format.h>

#include "arcenv/errors.hpp"

namespace arcenv {

std::string Rgb::hex() const { return fmt::format("#{:02x}{:02x}{:02x}", r, g, b); }

Palette Palette::arc() {
  Palette p;
  p.colors = {Rgb{0x00, 0x00, 0x00}, Rgb{0x00, 0x74, 0xd9}, Rgb{0xff, 0x41, 0x36}, Rgb{0x2e, 0xcc, 0x40},
              Rgb{0xff, 0xdc, 0x00}, Rgb{0xaa, 0xaa, 0xaa}, Rgb{0xf0, 0x12, 0xbe}, Rgb{0xff, 0x85, 0x1b},
              Rgb{0x7f, 0xdb, 0xff}, Rgb{0x87, 0x0c, 0x25}};
  p.background = {0xff, 0xff, 0xff};
  p.grid_line = {0x55, 0x55, 0x55};
  p.highlight = {0xff, 0xff, 0xff};
  p.text = {0x22, 0x22, 0x22};
  return p;
}

void Palette::validate() const {
  std::set<std::string> seen;
  for (const auto& c : colors) seen.insert(c.hex());
  if (seen.size() != colors.size()) throw Error(ErrorCode::InvalidConfig, "render.palette: colors must be distinct");
}

const char* to_string(RenderMode m) {
  switch (m) {
    case RenderMode::Pair: return "pair";
    case RenderMode::Single: return "single";
    case RenderMode::RlStep: return "rl_step";
    case RenderMode::CompleteTask: return "complete_task";
  }
  return "?";
}

const char* to_string(RenderBackend b) {
  switch (b) {
    case RenderBackend::Svg: return "svg";
    case RenderBackend::Ansi: return "ansi";
    case RenderBackend::Ascii: return "ascii";
  }
  return "?";
}

void RenderSpec::validate() const {
  if (cell_px < 1) throw Error(ErrorCode::InvalidConfig, "render.cell_px: must be >= 1");
  palette.validate();
}

std::string format_reward(double reward) {
  if (reward == 0.0) reward = 0.0;  // drop the sign of negative zero
  std::string s = fmt::format("{:+.2f}", reward);
  return s == "-0.00" ? "+0.00" : s;
}

namespace {

struct Panel {
  const PaddedGrid* grid;
  std::optional<SelectionMask> outline;

  int width_px(int cell) const { return grid->width() * cell; }
  int height_px(int cell) const { return grid->height() * cell; }
};

struct Row {
  std::vector<Panel> panels;
  std::string label;  // text backends only
  std::string separator;
};

std::optional<SelectionMask> outline_for(const std::optional<SelectionMask>& mask, const PaddedGrid& grid) {
  if (!mask) return std::nullopt;
  return effective_mask(*mask, grid);
}

// ---- SVG ----

int row_width(const Row& row, int cell) {
  int w = 0;
  for (const auto& p : row.panels) w += p.width_px(cell);
  if (row.panels.size() > 1) w += kSvgPanelGap * static_cast<int>(row.panels.size() - 1);
  return w;
}

int row_height(const Row& row, int cell) {
  int h = 0;
  for (const auto& p : row.panels) h = std::max(h, p.height_px(cell));
  return h;
}

void svg_panel(std::string& out, const Panel& p, int x0, int y0, const RenderSpec& spec) {
  const int cell = spec.cell_px;
  const PaddedGrid& g = *p.grid;
  if (g.empty()) return;
  out += fmt::format("<g stroke=\"{}\" stroke-width=\"1\">\n", spec.palette.grid_line.hex());
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", x0 + c * cell,
                         y0 + r * cell, cell, cell, spec.palette.colors[g.at(r, c)].hex());
    }
  }
  out += "</g>\n";
  if (p.outline && p.outline->count() > 0) {
    out += fmt::format("<g fill=\"none\" stroke=\"{}\" stroke-width=\"2\">\n", spec.palette.highlight.hex());
    for (int r = 0; r < g.height(); ++r) {
      for (int c = 0; c < g.width(); ++c) {
        if (!p.outline->test(r, c)) continue;
        out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>\n", x0 + c * cell, y0 + r * cell,
                           cell, cell);
      }
    }
    out += "</g>\n";
  }
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_document(const std::vector<Row>& rows, const std::string& caption, const RenderSpec& spec) {
  const int cell = spec.cell_px;
  int content_w = 0;
  int content_h = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    content_w = std::max(content_w, row_width(rows[i], cell));
    content_h += row_height(rows[i], cell);
    if (i > 0) content_h += kSvgPanelGap;
  }
  if (!caption.empty()) content_h += kSvgCaptionHeight;
  const int width = content_w + 2 * kSvgMargin;
  const int height = content_h + 2 * kSvgMargin;

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      width, height);
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", width, height,
                     spec.palette.background.hex());
  int y = kSvgMargin;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    const int rh = row_height(row, cell);
    int x = kSvgMargin;
    for (std::size_t j = 0; j < row.panels.size(); ++j) {
      if (j > 0) {
        const int mid = x + kSvgPanelGap / 2;
        out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"1\"/>\n", mid,
                           y, y + rh, spec.palette.grid_line.hex());
        x += kSvgPanelGap;
      }
      svg_panel(out, row.panels[j], x, y, spec);
      x += row.panels[j].width_px(cell);
    }
    y += rh + kSvgPanelGap;
  }
  if (!caption.empty()) {
    const int baseline = height - kSvgMargin - 5;
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{}\">{}</text>\n",
                       kSvgMargin, baseline, spec.palette.text.hex(), xml_escape(caption));
  }
  out += "</svg>\n";
  return out;
}

// ---- Terminal ----

// Nearest entry of the xterm 6x6x6 color cube.
int xterm_index(const Rgb& c) {
  auto q = [](int v) { return v < 48 ? 0 : v < 115 ? 1 : (v - 35) / 40; };
  return 16 + 36 * q(c.r) + 6 * q(c.g) + q(c.b);
}

// Lines of one panel; every line is exactly 2 * width visible columns.
std::vector<std::string> text_panel(const Panel& p, const RenderSpec& spec) {
  const PaddedGrid& g = *p.grid;
  std::vector<std::string> lines;
  for (int r = 0; r < g.height(); ++r) {
    std::string line;
    for (int c = 0; c < g.width(); ++c) {
      const bool mark = p.outline && p.outline->test(r, c);
      if (spec.backend == RenderBackend::Ascii) {
        line += static_cast<char>('0' + g.at(r, c));
        line += mark ? '*' : ' ';
      } else {
        line += fmt::format("\x1b[48;5;{}m", xterm_index(spec.palette.colors[g.at(r, c)]));
        line += mark ? "\x1b[97m[]" : "  ";
      }
    }
    if (spec.backend == RenderBackend::Ansi && g.width() > 0) line += "\x1b[0m";
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string text_document(const std::vector<Row>& rows, const std::string& caption, const RenderSpec& spec) {
  std::string out;
  for (const Row& row : rows) {
    if (!row.label.empty()) out += row.label + "\n";
    std::vector<std::vector<std::string>> panels;
    std::size_t height = 0;
    for (const auto& p : row.panels) {
      panels.push_back(text_panel(p, spec));
      height = std::max(height, panels.back().size());
    }
    for (std::size_t line = 0; line < height; ++line) {
      std::string text;
      for (std::size_t j = 0; j < panels.size(); ++j) {
        if (j > 0) text += line == 0 ? row.separator : std::string(row.separator.size(), ' ');
        if (line < panels[j].size()) {
          text += panels[j][line];
        } else {
          text += std::string(2 * static_cast<std::size_t>(row.panels[j].grid->width()), ' ');
        }
      }
      while (!text.empty() && text.back() == ' ') text.pop_back();
      out += text + "\n";
    }
  }
  if (!caption.empty()) out += caption + "\n";
  return out;
}

std::string render_rows(const std::vector<Row>& rows, const std::string& caption, const RenderSpec& spec) {
  spec.validate();
  return spec.backend == RenderBackend::Svg ? svg_document(rows, caption, spec) : text_document(rows, caption, spec);
}

}  // namespace

std::string render_single(const PaddedGrid& grid, const RenderSpec& spec) {
  return render_rows({Row{{Panel{&grid, outline_for(spec.highlight, grid)}}, "", ""}}, "", spec);
}

std::string render_pair(const PaddedGrid& input, const PaddedGrid& output, const RenderSpec& spec) {
  Row row{{Panel{&input, outline_for(spec.highlight, input)}, Panel{&output, outline_for(spec.highlight, output)}},
          "",
          " -> "};
  return render_rows({row}, "", spec);
}

std::string render_rl_step(const EnvState& before, const Action& action, const EnvState& after, double reward,
                           const RenderSpec& spec) {
  Row row{{Panel{&before.working, effective_mask(action.selection, before.working)},
           Panel{&after.working, effective_mask(action.selection, after.working)}},
          "",
          " => "};
  std::string caption = fmt::format("op {} {}", action.op.value(), op_name(action.op));
  if (spec.show_reward) caption += " reward " + format_reward(reward);
  return render_rows({row}, caption, spec);
}

std::string render_complete_task(const RawTask& task, const RenderSpec& spec) {
  // Grids are held here so the panels can point at them.
  std::vector<PaddedGrid> grids;
  grids.reserve(task.demo_pairs.size() * 2 + task.test_pairs.size());
  for (const auto& p : task.demo_pairs) {
    grids.push_back(pad_into_buffer(p.input));
    grids.push_back(pad_into_buffer(p.output));
  }
  for (const auto& p : task.test_pairs) grids.push_back(pad_into_buffer(p.input));

  std::vector<Row> rows;
  std::size_t k = 0;
  for (std::size_t i = 0; i < task.demo_pairs.size(); ++i, k += 2) {
    rows.push_back(Row{{Panel{&grids[k], std::nullopt}, Panel{&grids[k + 1], std::nullopt}},
                       fmt::format("demo {}", i + 1),
                       " -> "});
  }
  for (std::size_t i = 0; i < task.test_pairs.size(); ++i, ++k) {
    rows.push_back(Row{{Panel{&grids[k], std::nullopt}}, fmt::format("test {}", i + 1), ""});
  }
  return render_rows(rows, "", spec);
}

}  // namespace arcenv
