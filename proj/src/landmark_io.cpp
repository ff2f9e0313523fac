#include "avocado/landmark_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace avocado {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_coord(const std::string& s, int lineno) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw DataError("landmarks: malformed coordinate '" + s + "' at row " +
                        std::to_string(lineno));
    }
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool trimmed_empty(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

LandmarkSet read_landmarks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("landmarks: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("landmarks: empty file " + path);

    const auto header = split_csv(line);
    int ndims;
    if (header.size() == 5 && header[0] == "id" && header[1] == "frame" && header[2] == "x" &&
        header[3] == "y" && header[4] == "z") {
        ndims = 3;
    } else if (header.size() == 4 && header[0] == "id" && header[1] == "frame" &&
               header[2] == "x" && header[3] == "y") {
        ndims = 2;
    } else {
        throw DataError("landmarks: expected header 'id,frame,x,y[,z]' at row 1 of " + path);
    }

    struct Entry {
        bool have_source = false, have_target = false;
        Vec source, target;
        int order = 0;
    };
    std::map<std::string, Entry> entries;
    std::vector<std::string> order;

    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed_empty(line)) continue;
        const auto cells = split_csv(line);
        if (static_cast<int>(cells.size()) != ndims + 2)
            throw DataError("landmarks: expected " + std::to_string(ndims + 2) +
                            " columns at row " + std::to_string(lineno));
        const std::string& id = cells[0];
        const std::string& frame = cells[1];
        if (id.empty()) throw DataError("landmarks: empty id at row " + std::to_string(lineno));
        Vec p;
        for (int d = 0; d < ndims; ++d) p[d] = parse_coord(cells[static_cast<std::size_t>(d) + 2], lineno);

        auto [it, inserted] = entries.try_emplace(id);
        if (inserted) {
            it->second.order = static_cast<int>(order.size());
            order.push_back(id);
        }
        if (frame == "source") {
            if (it->second.have_source)
                throw DataError("landmarks: duplicate (id, frame) = (" + id + ", source) at row " +
                                std::to_string(lineno));
            it->second.source = p;
            it->second.have_source = true;
        } else if (frame == "target") {
            if (it->second.have_target)
                throw DataError("landmarks: duplicate (id, frame) = (" + id + ", target) at row " +
                                std::to_string(lineno));
            it->second.target = p;
            it->second.have_target = true;
        } else {
            throw DataError("landmarks: frame must be 'source' or 'target' at row " +
                            std::to_string(lineno));
        }
    }

    LandmarkSet set;
    set.ndims = ndims;
    for (const auto& id : order) {
        const Entry& e = entries.at(id);
        if (!e.have_source || !e.have_target)
            throw DataError("landmarks: id '" + id + "' present only in the " +
                            (e.have_source ? std::string("source") : std::string("target")) +
                            " frame");
        set.pairs.push_back(LandmarkPair{id, e.source, e.target});
    }
    return set;
}

void write_landmarks(const LandmarkSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("landmarks: cannot write " + path);
    out << (set.ndims == 3 ? "id,frame,x,y,z" : "id,frame,x,y") << "\n";
    for (const auto& pr : set.pairs) {
        out << pr.id << ",source";
        for (int d = 0; d < set.ndims; ++d) out << "," << fmt_full(pr.source[d]);
        out << "\n" << pr.id << ",target";
        for (int d = 0; d < set.ndims; ++d) out << "," << fmt_full(pr.target[d]);
        out << "\n";
    }
    if (!out) throw DataError("landmarks: failed writing " + path);
}

}  // namespace avocado
