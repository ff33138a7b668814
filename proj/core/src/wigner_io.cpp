#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "kcoupler/phasespace.hpp"

namespace kcoupler {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xffu);
    return r;
  }
  return v;
}

}  // namespace

void write_wigner_csv(std::ostream& out, const WignerGrid& g) {
  out << "x,y,w\n";
  for (std::size_t ix = 0; ix < g.grid.nx; ++ix)
    for (std::size_t iy = 0; iy < g.grid.ny; ++iy)
      out << fmt17(g.grid.x(ix)) << ',' << fmt17(g.grid.y(iy)) << ',' << fmt17(g.at(ix, iy))
          << '\n';
}

void write_wigner_header_json(std::ostream& out, const WignerGrid& g) {
  nlohmann::ordered_json h;
  h["format"] = "kcoupler-wigner";
  h["version"] = 1;
  h["mode"] = g.mode.number();
  h["t"] = g.t;
  h["x_range"] = {g.grid.x_min, g.grid.x_max};
  h["y_range"] = {g.grid.y_min, g.grid.y_max};
  h["nx"] = g.grid.nx;
  h["ny"] = g.grid.ny;
  h["order"] = "row-major, index = ix * ny + iy";
  h["dtype"] = "float64-le";
  out << h.dump(2) << '\n';
}

void write_wigner_binary(std::ostream& out, const WignerGrid& g) {
  for (double v : g.values) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
}

WignerGrid read_wigner_binary(std::istream& header_json, std::istream& data) {
  const auto h = nlohmann::json::parse(header_json);
  if (h.value("format", "") != "kcoupler-wigner") throw PreconditionError("not a Wigner grid header");
  WignerGrid g;
  g.grid.x_min = h.at("x_range").at(0).get<double>();
  g.grid.x_max = h.at("x_range").at(1).get<double>();
  g.grid.y_min = h.at("y_range").at(0).get<double>();
  g.grid.y_max = h.at("y_range").at(1).get<double>();
  g.grid.nx = h.at("nx").get<std::size_t>();
  g.grid.ny = h.at("ny").get<std::size_t>();
  g.grid.validate();
  g.mode = Mode(h.at("mode").get<int>());
  g.t = h.at("t").get<double>();
  g.values.resize(g.grid.nx * g.grid.ny);
  for (double& v : g.values) {
    char bytes[8];
    if (!data.read(bytes, 8)) throw PreconditionError("truncated Wigner grid data");
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    v = std::bit_cast<double>(to_little_endian(bits));
  }
  return g;
}

}  // namespace kcoupler
