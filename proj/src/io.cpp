#include "fsw/io.hpp"

#include "fsw/config.hpp"
#include "fsw/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fsw {

namespace {

std::vector<std::string> split_commas(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string item;
  while (std::getline(in, item, ','))
    out.push_back(item);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

double to_double(const std::string &text, const std::filesystem::path &path, std::size_t line) {
  double value = 0.0;
  const char *begin = text.data();
  const char *end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw InvalidArgument(path.string() + ":" + std::to_string(line) + ": '" + text +
                          "' is not a number");
  return value;
}

std::ofstream open_out(const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw SimulationError("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InvalidArgument("cannot open '" + path.string() + "'");
  return in;
}

} // namespace

std::size_t CsvTable::column(const std::string &name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name)
      return c;
  throw InvalidArgument("CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::values(std::size_t c) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &row : rows)
    out.push_back(row.at(c));
  return out;
}

CsvTable read_csv(const std::filesystem::path &path) {
  std::ifstream in = open_in(path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    auto cells = split_commas(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " columns");
    std::vector<double> row;
    for (const auto &cell : cells)
      row.push_back(to_double(cell, path, line_no));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty())
    throw InvalidArgument("'" + path.string() + "' is empty");
  return table;
}

void write_csv(const std::filesystem::path &path, const CsvTable &table) {
  std::ofstream out = open_out(path);
  for (std::size_t c = 0; c < table.header.size(); ++c)
    out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (const auto &row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
  if (!out)
    throw SimulationError("error writing '" + path.string() + "'");
}

CsvTable traces_table(const RunHistory &history) {
  CsvTable t;
  t.header.push_back("time_s");
  for (const auto &name : history.probe_names)
    t.header.push_back(name + "_K");
  for (std::size_t n = 0; n < history.times.size(); ++n) {
    std::vector<double> row{history.times[n]};
    for (const auto &trace : history.traces)
      row.push_back(trace[n]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable energy_table(const std::vector<LedgerEntry> &ledger) {
  CsvTable t;
  t.header = {"time_s",     "input_J",     "stored_J",      "loss_top_J",
              "loss_side_J", "loss_bottom_J", "imbalance_rel"};
  for (const auto &e : ledger)
    t.rows.push_back({e.time, e.flows.input, e.stored, e.flows.loss_top, e.flows.loss_side,
                      e.flows.loss_bottom, e.relative_imbalance()});
  return t;
}

CsvTable streamlines_table(const std::vector<TracerPath> &paths) {
  CsvTable t;
  t.header = {"tracer_id", "step", "x", "y", "z"};
  for (std::size_t id = 0; id < paths.size(); ++id)
    for (std::size_t s = 0; s < paths[id].points.size(); ++s) {
      const Vec3 &p = paths[id].points[s];
      t.rows.push_back({static_cast<double>(id), static_cast<double>(s), p[0], p[1], p[2]});
    }
  return t;
}

CsvTable convergence_table(const CalibrationResult &result,
                           const std::vector<ParameterBounds> &free) {
  CsvTable t;
  t.header = {"iteration", "evaluations", "objective", "spread"};
  for (const auto &b : free)
    t.header.emplace_back(parameter_name(b.which));
  for (const auto &rec : result.history) {
    std::vector<double> row{static_cast<double>(rec.iteration),
                            static_cast<double>(rec.evaluations), rec.best_objective, rec.spread};
    row.insert(row.end(), rec.best_params.begin(), rec.best_params.end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<TargetTrace> read_targets(const std::filesystem::path &path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2 || table.rows.empty())
    throw InvalidArgument("'" + path.string() + "' needs a time column, a probe column and data");
  const auto times = table.values(0);
  std::vector<TargetTrace> targets;
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    std::string name = table.header[c];
    if (name.size() > 2 && name.compare(name.size() - 2, 2, "_K") == 0)
      name.resize(name.size() - 2);
    targets.push_back({name, times, table.values(c), 1.0});
  }
  return targets;
}

VtkGrid vtk_grid(const ThermalField &field, const std::vector<double> &temperature) {
  VtkGrid g;
  g.nx = field.nx;
  g.ny = field.ny;
  g.nz = field.nz;
  g.origin[0] = field.x_center(0);
  g.origin[1] = field.y_center(0);
  g.origin[2] = field.z_center(0);
  g.spacing[0] = field.dx;
  g.spacing[1] = field.dy;
  g.spacing[2] = field.dz;
  g.temperature = temperature;
  g.domain.reserve(field.tag.size());
  for (CellTag tag : field.tag)
    g.domain.push_back(static_cast<double>(static_cast<int>(tag)));
  return g;
}

void write_vtk(const std::filesystem::path &path, const VtkGrid &g, const std::string &title) {
  const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny * g.nz;
  if (g.temperature.size() != n || g.domain.size() != n)
    throw InvalidArgument("write_vtk: data size does not match the grid");
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n"
      << title.substr(0, 255) << '\n'
      << "ASCII\n"
      << "DATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << g.nx << ' ' << g.ny << ' ' << g.nz << '\n'
      << "ORIGIN " << format_number(g.origin[0]) << ' ' << format_number(g.origin[1]) << ' '
      << format_number(g.origin[2]) << '\n'
      << "SPACING " << format_number(g.spacing[0]) << ' ' << format_number(g.spacing[1]) << ' '
      << format_number(g.spacing[2]) << '\n'
      << "POINT_DATA " << n << '\n';
  auto block = [&](const char *name, const std::vector<double> &values) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < n; ++i)
      out << format_number(values[i]) << ((i + 1) % 8 == 0 || i + 1 == n ? '\n' : ' ');
  };
  block("temperature", g.temperature);
  block("domain", g.domain);
  if (!out)
    throw SimulationError("error writing '" + path.string() + "'");
}

VtkGrid read_vtk(const std::filesystem::path &path) {
  std::ifstream in = open_in(path);
  auto fail = [&](const std::string &what) {
    return InvalidArgument("'" + path.string() + "': " + what);
  };
  std::string line;
  std::getline(in, line);
  if (line.rfind("# vtk DataFile", 0) != 0)
    throw fail("not a legacy VTK file");
  std::getline(in, line); // title
  std::getline(in, line);
  if (line != "ASCII")
    throw fail("only ASCII files are supported");
  VtkGrid g;
  std::string word;
  std::size_t points = 0;
  auto read_number = [&] {
    if (!(in >> word))
      throw fail("unexpected end of file");
    return to_double(word, path, 0);
  };
  while (in >> word) {
    if (word == "DATASET") {
      in >> word;
      if (word != "STRUCTURED_POINTS")
        throw fail("dataset is not STRUCTURED_POINTS");
    } else if (word == "DIMENSIONS") {
      in >> g.nx >> g.ny >> g.nz;
    } else if (word == "ORIGIN") {
      for (double &v : g.origin)
        v = read_number();
    } else if (word == "SPACING") {
      for (double &v : g.spacing)
        v = read_number();
    } else if (word == "POINT_DATA") {
      in >> points;
    } else if (word == "SCALARS") {
      std::string name, type;
      int components = 1;
      in >> name >> type >> components;
      in >> word >> word; // LOOKUP_TABLE default
      std::vector<double> values(points);
      for (double &v : values)
        v = read_number();
      if (name == "temperature")
        g.temperature = std::move(values);
      else if (name == "domain")
        g.domain = std::move(values);
    } else {
      throw fail("unexpected token '" + word + "'");
    }
  }
  if (!in.eof() || g.temperature.size() != static_cast<std::size_t>(g.nx) * g.ny * g.nz)
    throw fail("malformed file");
  return g;
}

} // namespace fsw
