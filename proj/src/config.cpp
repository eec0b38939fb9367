// SPDX-License-Identifier: Apache-2.0
#include "onebit/config.hpp"

#include <fstream>
#include <sstream>

namespace onebit {

SystemConfig desk_profile() {
    SystemConfig cfg;
    cfg.bs_antennas = 16;
    cfg.irs_x = 2;
    cfg.irs_y = 4;
    cfg.users = 2;
    cfg.pilot_slots = 64;
    cfg.grid_rx = 32;
    cfg.grid_tx_x = 4;
    cfg.grid_tx_y = 4;
    cfg.paths_irs_bs = 2;
    cfg.paths_user_irs = 3;
    cfg.set_snr_db(0.0);
    return cfg;
}

SystemConfig paper_scale_profile() {
    SystemConfig cfg;
    cfg.bs_antennas = 32;
    cfg.irs_x = 4;
    cfg.irs_y = 4;
    cfg.users = 3;
    cfg.pilot_slots = 88;
    cfg.grid_rx = 64;
    cfg.grid_tx_x = 4;
    cfg.grid_tx_y = 8;
    cfg.paths_irs_bs = 2;
    cfg.paths_user_irs = 6;
    cfg.set_snr_db(0.0);
    return cfg;
}

namespace {

bool parse_bool(const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw ConfigError("config: expected a boolean, got '" + value + "'");
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

void apply_config_text(SystemConfig& cfg, std::istream& is) {
    std::string line;
    int line_number = 0;
    while (std::getline(is, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "M") cfg.bs_antennas = std::stoi(value);
            else if (key == "Nx") cfg.irs_x = std::stoi(value);
            else if (key == "Ny") cfg.irs_y = std::stoi(value);
            else if (key == "K") cfg.users = std::stoi(value);
            else if (key == "Q") cfg.pilot_slots = std::stoi(value);
            else if (key == "G_r") cfg.grid_rx = std::stoi(value);
            else if (key == "G_tx") cfg.grid_tx_x = std::stoi(value);
            else if (key == "G_ty") cfg.grid_tx_y = std::stoi(value);
            else if (key == "L_G") cfg.paths_irs_bs = std::stoi(value);
            else if (key == "L_r") cfg.paths_user_irs = std::stoi(value);
            else if (key == "snr_db") cfg.set_snr_db(std::stod(value));
            else if (key == "sigma2") cfg.set_noise_var(std::stod(value));
            else if (key == "on_grid") cfg.on_grid = parse_bool(value);
            else if (key == "gamma_th") cfg.gamma_th = std::stod(value);
            else if (key == "p_max") cfg.p_max = std::stoi(value);
            else if (key == "max_em_iters") cfg.max_em_iters = std::stoi(value);
            else if (key == "em_tol") cfg.em_tol = std::stod(value);
            else if (key == "eta") cfg.eta = std::stod(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else
                throw ConfigError("config line " + std::to_string(line_number) +
                                  ": unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument&) {
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": bad value '" + value + "' for key '" + key + "'");
        } catch (const std::out_of_range&) {
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": value out of range for key '" + key + "'");
        }
    }
}

SystemConfig load_config_file(const std::string& path, SystemConfig base) {
    std::ifstream file(path);
    if (!file) throw ConfigError("config file not found: " + path);
    apply_config_text(base, file);
    base.validate();
    return base;
}

}  // namespace onebit
