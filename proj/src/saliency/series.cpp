#include "hism/saliency/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hism/error.hpp"

namespace hism::saliency {

SaliencySeries::SaliencySeries(double width, double start, int windows, int elements)
    : window_width(width),
      t0(start),
      num_windows(windows),
      num_elements(elements),
      weights(static_cast<std::size_t>(windows) * static_cast<std::size_t>(elements), 0.0),
      masked(static_cast<std::size_t>(windows), 1) {}

long SaliencySeries::window_index(double t) const {
  return static_cast<long>(std::floor((t - t0) / window_width));
}

int windows_for_duration(double duration, double window_width) {
  return static_cast<int>(std::ceil(duration / window_width - 1e-9));
}

namespace {

void normalize_rows(SaliencySeries& s, const std::vector<double>& totals) {
  for (int w = 0; w < s.num_windows; ++w) {
    const double total = totals[static_cast<std::size_t>(w)];
    if (total <= 0.0) {
      for (int e = 0; e < s.num_elements; ++e) s.at(w, e) = 0.0;
      s.masked[static_cast<std::size_t>(w)] = 1;
      continue;
    }
    s.masked[static_cast<std::size_t>(w)] = 0;
    for (int e = 0; e < s.num_elements; ++e) s.at(w, e) /= total;
  }
}

}  // namespace

SaliencySeries element_saliency(std::span<const gaze::GazeSample> samples, const scene::InterfaceLayout& layout,
                                double window_width, std::optional<int> num_windows) {
  if (!(window_width > 0.0)) throw Error(ErrorCode::invalid_argument, "window width must be positive");
  int n = num_windows.value_or(0);
  if (!num_windows && !samples.empty()) n = static_cast<int>(std::floor(samples.back().t / window_width)) + 1;
  SaliencySeries s(window_width, 0.0, n, static_cast<int>(layout.elements.size()));
  std::vector<double> totals(static_cast<std::size_t>(n), 0.0);
  for (const auto& g : samples) {
    if (!g.valid) continue;
    const long w = s.window_index(g.t);
    if (w < 0 || w >= n) continue;
    const auto e = scene::element_at(layout, g.x, g.y);
    if (!e) continue;
    s.at(static_cast<int>(w), *e) += 1.0;
    totals[static_cast<std::size_t>(w)] += 1.0;
  }
  normalize_rows(s, totals);
  return s;
}

SaliencySeries element_saliency_from_fixations(std::span<const gaze::Fixation> fixations,
                                               const scene::InterfaceLayout& layout, double window_width,
                                               int num_windows) {
  if (!(window_width > 0.0)) throw Error(ErrorCode::invalid_argument, "window width must be positive");
  SaliencySeries s(window_width, 0.0, num_windows, static_cast<int>(layout.elements.size()));
  std::vector<double> totals(static_cast<std::size_t>(num_windows), 0.0);
  for (const auto& f : fixations) {
    const auto e = scene::element_at(layout, f.x, f.y);
    if (!e) continue;
    const long w0 = std::max(0L, s.window_index(f.start));
    const long w1 = std::min(static_cast<long>(num_windows) - 1, s.window_index(f.end));
    for (long w = w0; w <= w1; ++w) {
      const double lo = std::max(f.start, s.window_start(static_cast<int>(w)));
      const double hi = std::min(f.end, s.window_start(static_cast<int>(w)) + window_width);
      if (hi <= lo) continue;
      s.at(static_cast<int>(w), *e) += hi - lo;
      totals[static_cast<std::size_t>(w)] += hi - lo;
    }
  }
  normalize_rows(s, totals);
  return s;
}

SaliencySeries pool_series(std::span<const SaliencySeries> series) {
  if (series.empty()) throw Error(ErrorCode::insufficient_data, "nothing to pool");
  const auto& first = series.front();
  for (const auto& s : series)
    if (s.num_windows != first.num_windows || s.num_elements != first.num_elements ||
        s.window_width != first.window_width || s.t0 != first.t0)
      throw Error(ErrorCode::grid_mismatch, "pooled series must share one window grid and layout");
  SaliencySeries out(first.window_width, first.t0, first.num_windows, first.num_elements);
  std::vector<double> totals(static_cast<std::size_t>(out.num_windows), 0.0);
  for (int w = 0; w < out.num_windows; ++w) {
    int contributors = 0;
    for (const auto& s : series)
      if (!s.is_masked(w)) ++contributors;
    if (contributors == 0) continue;
    for (const auto& s : series) {
      if (s.is_masked(w)) continue;
      for (int e = 0; e < out.num_elements; ++e) out.at(w, e) += s.at(w, e) / contributors;
    }
    for (int e = 0; e < out.num_elements; ++e) totals[static_cast<std::size_t>(w)] += out.at(w, e);
  }
  normalize_rows(out, totals);
  return out;
}

SaliencySeries align_to_event(const SaliencySeries& series, double event_time, double pre, double post) {
  if (pre < 0.0 || post < 0.0) throw Error(ErrorCode::invalid_argument, "pre and post must be non-negative");
  const long center = series.window_index(event_time);
  if (center < 0 || center >= series.num_windows)
    throw Error(ErrorCode::event_out_of_range, "event at " + std::to_string(event_time) + " s lies outside the series");
  const auto n_pre = static_cast<long>(std::llround(pre / series.window_width));
  const auto n_post = std::max(1L, static_cast<long>(std::ceil(post / series.window_width - 1e-9)));
  SaliencySeries out(series.window_width, -n_pre * series.window_width, static_cast<int>(n_pre + n_post),
                     series.num_elements);
  for (long k = 0; k < n_pre + n_post; ++k) {
    const long src = center - n_pre + k;
    if (src < 0 || src >= series.num_windows) continue;
    out.masked[static_cast<std::size_t>(k)] = series.masked[static_cast<std::size_t>(src)];
    for (int e = 0; e < series.num_elements; ++e) out.at(static_cast<int>(k), e) = series.at(static_cast<int>(src), e);
  }
  return out;
}

ElementCurve extract_element_curve(const SaliencySeries& series, int element_id) {
  const int ids[] = {element_id};
  return extract_aoi_curve(series, ids);
}

ElementCurve extract_aoi_curve(const SaliencySeries& series, std::span<const int> element_ids) {
  for (const int id : element_ids)
    if (id < 0 || id >= series.num_elements)
      throw Error(ErrorCode::unknown_element, "element " + std::to_string(id) + " not in series");
  ElementCurve c{series.t0, series.window_width, {}, series.masked};
  c.values.resize(static_cast<std::size_t>(series.num_windows), 0.0);
  for (int w = 0; w < series.num_windows; ++w)
    for (const int id : element_ids) c.values[static_cast<std::size_t>(w)] += series.at(w, id);
  return c;
}

std::string format_saliency_csv(const SaliencySeries& series, const std::string& source) {
  std::string out = source.empty() ? "window_start_s,element_id,weight,masked\n"
                                   : "window_start_s,element_id,weight,masked,source\n";
  char buf[128];
  for (int w = 0; w < series.num_windows; ++w) {
    for (int e = 0; e < series.num_elements; ++e) {
      const int n = std::snprintf(buf, sizeof buf, "%.3f,%d,%.17g,%d", series.window_start(w), e, series.at(w, e),
                                  series.is_masked(w) ? 1 : 0);
      out.append(buf, static_cast<std::size_t>(n));
      if (!source.empty()) out += "," + source;
      out += '\n';
    }
  }
  return out;
}

void write_saliency_csv(const std::filesystem::path& path, const SaliencySeries& series, const std::string& source) {
  std::ofstream out(path, std::ios::binary);
  const auto text = format_saliency_csv(series, source);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path.string());
}

SaliencySeries read_saliency_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_failure, "cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  struct Row {
    double start;
    int element;
    double weight;
    int masked;
  };
  std::vector<Row> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Row r{};
    if (std::sscanf(line.c_str(), "%lf,%d,%lf,%d", &r.start, &r.element, &r.weight, &r.masked) != 4)
      throw Error(ErrorCode::parse_error, path.string() + ": line " + std::to_string(line_no));
    rows.push_back(r);
  }
  if (rows.empty()) return {};
  int n_elements = 0;
  for (const auto& r : rows) n_elements = std::max(n_elements, r.element + 1);
  const int n_windows = static_cast<int>(rows.size()) / n_elements;
  const double width = n_windows > 1 ? rows[static_cast<std::size_t>(n_elements)].start - rows[0].start : 0.5;
  SaliencySeries s(width, rows[0].start, n_windows, n_elements);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int w = static_cast<int>(i) / n_elements;
    s.at(w, rows[i].element) = rows[i].weight;
    s.masked[static_cast<std::size_t>(w)] = static_cast<std::uint8_t>(rows[i].masked);
  }
  return s;
}

}  // namespace hism::saliency
