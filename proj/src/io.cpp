// SPDX-License-Identifier: Apache-2.0
//
// mmray - site-specific mmWave/sub-THz ray tracing and material calibration
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmray/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mmray {

using nlohmann::json;

namespace {

json load_json(const std::filesystem::path &file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open file: " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw ValidationError(file.string() + ": " + e.what());
    }
    return j;
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double to_double(const std::string &s, const std::string &field) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw ValidationError("field '" + field + "': not a number: '" + s + "'");
    }
}

}  // namespace

EnvironmentMap load_environment(const std::filesystem::path &file) {
    json j = load_json(file);
    if (!j.contains("version")) throw ValidationError("environment: missing field 'version'");
    if (j["version"].get<int>() != 1)
        throw ValidationError("environment: unsupported 'version'");
    if (!j.contains("materials") || !j["materials"].is_object())
        throw ValidationError("environment: missing object 'materials'");
    if (!j.contains("obstructions") || !j["obstructions"].is_array())
        throw ValidationError("environment: missing array 'obstructions'");

    EnvironmentMap env;
    for (auto &[name, m] : j["materials"].items()) {
        MaterialProfile mat;
        mat.name = name;
        if (!m.contains("reflection_loss_db"))
            throw ValidationError("material '" + name + "': missing 'reflection_loss_db'");
        mat.reflection_loss_db = m["reflection_loss_db"].get<double>();
        bool opaque = m.value("opaque", false);
        if (!opaque) {
            if (!m.contains("penetration_loss_db"))
                throw ValidationError("material '" + name +
                                      "': missing 'penetration_loss_db' (or set opaque)");
            mat.penetration_loss_db = m["penetration_loss_db"].get<double>();
        }
        mat.roughness_height_m = m.value("roughness_height_m", 0.0);
        mat.scattering_enabled = m.value("scattering", false);
        if (mat.reflection_loss_db < 0.0 ||
            (mat.penetration_loss_db && *mat.penetration_loss_db < 0.0))
            throw ValidationError("material '" + name + "': losses must be >= 0");
        env.materials[name] = mat;
    }
    for (auto &o : j["obstructions"]) {
        Obstruction ob;
        if (!o.contains("name")) throw ValidationError("obstruction: missing 'name'");
        ob.id = o["name"].get<std::string>();
        if (!o.contains("material"))
            throw ValidationError("obstruction '" + ob.id + "': missing 'material'");
        ob.material_id = o["material"].get<std::string>();
        if (!o.contains("vertices") || !o["vertices"].is_array())
            throw ValidationError("obstruction '" + ob.id + "': missing array 'vertices'");
        for (auto &v : o["vertices"]) {
            if (!v.is_array() || v.size() != 3)
                throw ValidationError("obstruction '" + ob.id + "': vertex must be [x,y,z]");
            ob.vertices.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
        }
        env.obstructions.push_back(std::move(ob));
    }
    try {
        env.finalize();
    } catch (const std::invalid_argument &e) {
        throw ValidationError(std::string("environment: ") + e.what());
    }
    return env;
}

AntennaPattern load_antenna_cut(const std::filesystem::path &file, double boresight_gain_dbi,
                                double hpbw_deg) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open antenna cut: " + file.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("angle_deg,relative_gain_db", 0) != 0)
        throw ValidationError("antenna cut: expected header 'angle_deg,relative_gain_db'");
    AntennaPattern p;
    p.boresight_gain_dbi = boresight_gain_dbi;
    p.hpbw_deg = hpbw_deg;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 2) throw ValidationError("antenna cut: bad row '" + line + "'");
        p.azimuth_cut.emplace_back(to_double(cells[0], "angle_deg"),
                                   to_double(cells[1], "relative_gain_db"));
    }
    std::sort(p.azimuth_cut.begin(), p.azimuth_cut.end());
    try {
        p.validate();
    } catch (const std::invalid_argument &e) {
        throw ValidationError(std::string("antenna cut: ") + e.what());
    }
    return p;
}

Vec3 az_el_to_vec(double az_deg, double el_deg) {
    double az = deg2rad(az_deg), el = deg2rad(el_deg);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

void vec_to_az_el(const Vec3 &v, double &az_deg, double &el_deg) {
    az_deg = rad2deg(std::atan2(v.y, v.x));
    el_deg = rad2deg(std::asin(std::clamp(v.z, -1.0, 1.0)));
}

std::vector<MeasurementRecord> load_measurements(const std::filesystem::path &file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open measurements: " + file.string());
    std::string line;
    const std::string header =
        "id,tx_x,tx_y,tx_z,rx_x,rx_y,rx_z,tx_az_deg,tx_el_deg,rx_az_deg,rx_el_deg,"
        "tx_power_dbm,measured_power_dbm,freq_ghz";
    if (!std::getline(in, line) || line.rfind(header, 0) != 0)
        throw ValidationError("measurements: expected header '" + header + "'");
    std::vector<MeasurementRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto c = split_csv_line(line);
        if (c.size() != 14) throw ValidationError("measurements: bad row '" + line + "'");
        MeasurementRecord r;
        r.id = c[0];
        r.tx_pose.position = {to_double(c[1], "tx_x"), to_double(c[2], "tx_y"),
                              to_double(c[3], "tx_z")};
        r.rx_pose.position = {to_double(c[4], "rx_x"), to_double(c[5], "rx_y"),
                              to_double(c[6], "rx_z")};
        r.tx_pose.boresight = az_el_to_vec(to_double(c[7], "tx_az_deg"), to_double(c[8], "tx_el_deg"));
        r.rx_pose.boresight =
            az_el_to_vec(to_double(c[9], "rx_az_deg"), to_double(c[10], "rx_el_deg"));
        r.tx_power_dbm = to_double(c[11], "tx_power_dbm");
        r.measured_power_dbm = to_double(c[12], "measured_power_dbm");
        r.frequency_ghz = to_double(c[13], "freq_ghz");
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string components_to_csv(const std::vector<MultipathComponent> &components,
                              const EnvironmentMap &env) {
    std::ostringstream os;
    os << "path_id,power_dbm,tof_ns,aod_az_deg,aod_el_deg,aoa_az_deg,aoa_el_deg,"
          "n_refl,n_pen,n_scat,signature\n";
    for (size_t i = 0; i < components.size(); ++i) {
        const auto &c = components[i];
        double aod_az, aod_el, aoa_az, aoa_el;
        vec_to_az_el(c.aod, aod_az, aod_el);
        vec_to_az_el(c.aoa, aoa_az, aoa_el);
        int nr = 0, np = 0, ns = 0;
        for (const auto &s : c.signature) {
            if (s.kind == InteractionKind::Reflection) nr++;
            if (s.kind == InteractionKind::Penetration) np++;
            if (s.kind == InteractionKind::Scattering) ns++;
        }
        os << i << ',' << format_number(c.power_dbm) << ',' << format_number(c.tof_ns) << ','
           << format_number(aod_az) << ',' << format_number(aod_el) << ','
           << format_number(aoa_az) << ',' << format_number(aoa_el) << ',' << nr << ',' << np
           << ',' << ns << ',' << signature_to_string(c.signature, env) << '\n';
    }
    return os.str();
}

std::vector<MultipathComponent> components_from_csv(const std::filesystem::path &file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open components: " + file.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("path_id,power_dbm,tof_ns", 0) != 0)
        throw ValidationError("components: unexpected header");
    std::vector<MultipathComponent> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto c = split_csv_line(line);
        if (c.size() != 11) throw ValidationError("components: bad row '" + line + "'");
        MultipathComponent mc;
        mc.power_dbm = to_double(c[1], "power_dbm");
        mc.tof_ns = to_double(c[2], "tof_ns");
        mc.path_length_m = mc.tof_ns * 1e-9 * kSpeedOfLight;
        mc.aod = az_el_to_vec(to_double(c[3], "aod_az_deg"), to_double(c[4], "aod_el_deg"));
        mc.aoa = az_el_to_vec(to_double(c[5], "aoa_az_deg"), to_double(c[6], "aoa_el_deg"));
        out.push_back(std::move(mc));
    }
    return out;
}

std::string spreads_to_csv(const std::vector<SpreadReport> &reports) {
    std::ostringstream os;
    os << "location,rms_delay_spread_ns,rms_angular_spread_deg,n_components\n";
    for (const auto &r : reports)
        os << r.location << ',' << format_number(r.rms_delay_spread_ns) << ','
           << format_number(r.rms_angular_spread_deg) << ',' << r.n_components << '\n';
    return os.str();
}

std::vector<SpreadReport> spreads_from_csv(const std::filesystem::path &file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open spreads: " + file.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("location,rms_delay_spread_ns", 0) != 0)
        throw ValidationError("spreads: unexpected header");
    std::vector<SpreadReport> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto c = split_csv_line(line);
        if (c.size() != 4) throw ValidationError("spreads: bad row '" + line + "'");
        SpreadReport r;
        r.location = c[0];
        r.rms_delay_spread_ns = to_double(c[1], "rms_delay_spread_ns");
        r.rms_angular_spread_deg = to_double(c[2], "rms_angular_spread_deg");
        r.n_components = static_cast<int>(to_double(c[3], "n_components"));
        out.push_back(std::move(r));
    }
    return out;
}

void atomic_write(const std::filesystem::path &file, const std::string &content) {
    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write: " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, file);
}

std::string render_svg(const std::vector<SvgSeries> &series, const std::string &x_label,
                       const std::string &y_label, int width, int height) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto &s : series)
        for (const auto &[x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double ml = 60, mr = 15, mt = 15, mb = 45;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
       << height - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 10
       << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    os << "<text x=\"15\" y=\"" << (mt + height - mb) / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 "
       << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";
    for (const auto &s : series) {
        if (!s.scatter && s.points.size() > 1) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
            for (const auto &[x, y] : s.points) os << format_number(px(x)) << ',' << format_number(py(y)) << ' ';
            os << "\"/>\n";
        }
        for (const auto &[x, y] : s.points)
            os << "<circle cx=\"" << format_number(px(x)) << "\" cy=\"" << format_number(py(y))
               << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace mmray
