#pragma once
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixture {

using Row = std::map<std::string, std::string>;

inline std::vector<Row> read_csv(const std::string& name) {
    std::ifstream in(std::string(DECLAB_SOURCE_DIR) + "/tests/fixtures/" + name);
    if (!in) throw std::runtime_error("missing fixture " + name);
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    std::string line;
    std::getline(in, line);
    auto header = split(line);
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        Row r;
        for (size_t i = 0; i < header.size() && i < cells.size(); ++i) r[header[i]] = cells[i];
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace fixture
