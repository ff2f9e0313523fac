#include "avocado/metaimage.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace avocado {

namespace {

static_assert(std::endian::native == std::endian::little,
              "raw payload IO assumes a little-endian host");

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct Header {
    int ndims = 0;
    std::array<int, 3> dims{1, 1, 1};
    Vec spacing{1, 1, 1};
    Vec offset{0, 0, 0};
    int channels = 1;
    std::string datafile;
    std::string comment;
};

std::vector<double> parse_numbers(const std::string& s, const std::string& key, int line) {
    std::istringstream iss(s);
    std::vector<double> out;
    double v;
    while (iss >> v) out.push_back(v);
    const bool hard_fail = iss.fail() && !iss.eof();
    iss.clear();
    std::string rest;
    if (hard_fail || (iss >> rest))
        throw DataError("metaimage: malformed value for " + key + " at header line " +
                        std::to_string(line));
    return out;
}

Header read_header(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("metaimage: cannot open header " + path);
    Header h;
    bool saw_ndims = false, saw_dims = false, saw_spacing = false, saw_offset = false,
         saw_type = false, saw_datafile = false;
    std::string line;
    int lineno = 0;
    std::string dims_raw, spacing_raw, offset_raw;
    int dims_line = 0, spacing_line = 0, offset_line = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw DataError("metaimage: expected 'Key = value' at header line " +
                            std::to_string(lineno) + " of " + path);
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key == "NDims") {
            h.ndims = static_cast<int>(parse_numbers(val, key, lineno).at(0));
            saw_ndims = true;
        } else if (key == "DimSize") {
            dims_raw = val;
            dims_line = lineno;
            saw_dims = true;
        } else if (key == "ElementSpacing") {
            spacing_raw = val;
            spacing_line = lineno;
            saw_spacing = true;
        } else if (key == "Offset") {
            offset_raw = val;
            offset_line = lineno;
            saw_offset = true;
        } else if (key == "ElementType") {
            if (val != "MET_FLOAT")
                throw DataError("metaimage: unsupported ElementType '" + val +
                                "' (only MET_FLOAT) at header line " + std::to_string(lineno));
            saw_type = true;
        } else if (key == "ElementByteOrderMSB" || key == "BinaryDataByteOrderMSB") {
            if (val != "False" && val != "false")
                throw DataError("metaimage: unsupported encoding, " + key +
                                " must be False (little-endian) at header line " +
                                std::to_string(lineno));
        } else if (key == "ElementNumberOfChannels") {
            h.channels = static_cast<int>(parse_numbers(val, key, lineno).at(0));
        } else if (key == "ElementDataFile") {
            if (val == "LOCAL")
                throw DataError("metaimage: inline (LOCAL) payloads unsupported, header line " +
                                std::to_string(lineno));
            h.datafile = val;
            saw_datafile = true;
        } else if (key == "CompressedData") {
            if (val != "False" && val != "false")
                throw DataError("metaimage: compressed payloads unsupported, header line " +
                                std::to_string(lineno));
        } else if (key == "Comment") {
            h.comment = val;
        }
        // Other MetaImage keys (BinaryData, TransformMatrix, ...) are ignored.
    }
    if (!saw_ndims) throw DataError("metaimage: missing NDims in " + path);
    if (!saw_dims) throw DataError("metaimage: missing DimSize in " + path);
    if (!saw_spacing) throw DataError("metaimage: missing ElementSpacing in " + path);
    if (!saw_offset) throw DataError("metaimage: missing Offset in " + path);
    if (!saw_type) throw DataError("metaimage: missing ElementType in " + path);
    if (!saw_datafile) throw DataError("metaimage: missing ElementDataFile in " + path);
    if (h.ndims != 2 && h.ndims != 3)
        throw DataError("metaimage: NDims must be 2 or 3 in " + path);

    const auto dims = parse_numbers(dims_raw, "DimSize", dims_line);
    if (static_cast<int>(dims.size()) != h.ndims)
        throw DataError("metaimage: DimSize has " + std::to_string(dims.size()) +
                        " entries but NDims = " + std::to_string(h.ndims) + ", header line " +
                        std::to_string(dims_line));
    const auto sp = parse_numbers(spacing_raw, "ElementSpacing", spacing_line);
    if (static_cast<int>(sp.size()) != h.ndims)
        throw DataError("metaimage: ElementSpacing entry count mismatch at header line " +
                        std::to_string(spacing_line));
    const auto off = parse_numbers(offset_raw, "Offset", offset_line);
    if (static_cast<int>(off.size()) != h.ndims)
        throw DataError("metaimage: Offset entry count mismatch at header line " +
                        std::to_string(offset_line));
    for (int d = 0; d < h.ndims; ++d) {
        h.dims[d] = static_cast<int>(dims[d]);
        h.spacing[d] = sp[d];
        h.offset[d] = off[d];
    }
    return h;
}

std::vector<float> read_payload(const std::string& header_path, const Header& h) {
    namespace fs = std::filesystem;
    const fs::path raw = fs::path(header_path).parent_path() / h.datafile;
    std::ifstream in(raw, std::ios::binary);
    if (!in) throw DataError("metaimage: cannot open payload " + raw.string());
    in.seekg(0, std::ios::end);
    const std::streamoff bytes = in.tellg();
    in.seekg(0);
    std::size_t expected = static_cast<std::size_t>(h.channels) * sizeof(float);
    for (int d = 0; d < h.ndims; ++d) expected *= static_cast<std::size_t>(h.dims[d]);
    if (static_cast<std::size_t>(bytes) != expected)
        throw DataError("metaimage: payload " + raw.string() + " holds " + std::to_string(bytes) +
                        " bytes, header implies " + std::to_string(expected));
    std::vector<float> buf(expected / sizeof(float));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(expected));
    if (!in) throw DataError("metaimage: short read from " + raw.string());
    return buf;
}

void write_files(const std::string& path, const Header& h, const std::vector<float>& payload) {
    namespace fs = std::filesystem;
    const fs::path hdr(path);
    const fs::path raw = fs::path(hdr).replace_extension(".raw");
    std::ofstream out(hdr);
    if (!out) throw DataError("metaimage: cannot write header " + path);
    out << "NDims = " << h.ndims << "\n";
    out << "DimSize =";
    for (int d = 0; d < h.ndims; ++d) out << " " << h.dims[d];
    out << "\nElementSpacing =";
    for (int d = 0; d < h.ndims; ++d) out << " " << h.spacing[d];
    out << "\nOffset =";
    for (int d = 0; d < h.ndims; ++d) out << " " << h.offset[d];
    out << "\n";
    if (h.channels != 1) out << "ElementNumberOfChannels = " << h.channels << "\n";
    if (!h.comment.empty()) out << "Comment = " << h.comment << "\n";
    out << "ElementType = MET_FLOAT\n";
    out << "ElementByteOrderMSB = False\n";
    out << "ElementDataFile = " << raw.filename().string() << "\n";
    if (!out) throw DataError("metaimage: failed writing header " + path);

    std::ofstream rawout(raw, std::ios::binary);
    if (!rawout) throw DataError("metaimage: cannot write payload " + raw.string());
    rawout.write(reinterpret_cast<const char*>(payload.data()),
                 static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!rawout) throw DataError("metaimage: failed writing payload " + raw.string());
}

Grid grid_from_header(const Header& h) {
    return Grid(h.ndims, h.dims, h.spacing, h.offset);
}

}  // namespace

ScalarField read_volume(const std::string& path) {
    const Header h = read_header(path);
    if (h.channels != 1)
        throw DataError("metaimage: " + path + " has " + std::to_string(h.channels) +
                        " channels, expected a scalar volume");
    const auto payload = read_payload(path, h);
    ScalarField f(grid_from_header(h));
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(payload[i]);
    return f;
}

void write_volume(const ScalarField& field, const std::string& path) {
    const Grid& g = field.grid();
    Header h;
    h.ndims = g.ndims();
    h.dims = g.dims();
    for (int d = 0; d < g.ndims(); ++d) {
        h.spacing[d] = g.spacing(d);
        h.offset[d] = g.origin(d);
    }
    std::vector<float> payload(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) payload[i] = static_cast<float>(field[i]);
    write_files(path, h, payload);
}

VectorField read_vector_field(const std::string& path) {
    const Header h = read_header(path);
    if (h.channels != h.ndims)
        throw DataError("metaimage: " + path + " has " + std::to_string(h.channels) +
                        " channels, expected " + std::to_string(h.ndims) +
                        " for a vector field");
    const auto payload = read_payload(path, h);
    VectorField v(grid_from_header(h));
    const std::size_t n = v.voxel_count();
    for (std::size_t i = 0; i < n; ++i)
        for (int d = 0; d < h.ndims; ++d)
            v.at(d, i) = static_cast<double>(payload[i * static_cast<std::size_t>(h.channels) +
                                                     static_cast<std::size_t>(d)]);
    return v;
}

void write_vector_field(const VectorField& v, const std::string& path, const std::string& comment) {
    const Grid& g = v.grid();
    Header h;
    h.ndims = g.ndims();
    h.dims = g.dims();
    h.channels = g.ndims();
    h.comment = comment;
    for (int d = 0; d < g.ndims(); ++d) {
        h.spacing[d] = g.spacing(d);
        h.offset[d] = g.origin(d);
    }
    const std::size_t n = v.voxel_count();
    std::vector<float> payload(n * static_cast<std::size_t>(h.channels));
    for (std::size_t i = 0; i < n; ++i)
        for (int d = 0; d < h.ndims; ++d)
            payload[i * static_cast<std::size_t>(h.channels) + static_cast<std::size_t>(d)] =
                static_cast<float>(v.at(d, i));
    write_files(path, h, payload);
}

InverseMap map_from_displacement(const VectorField& disp) {
    const Grid& g = disp.grid();
    InverseMap m(g);
    for (int k = 0; k < g.dim(2); ++k)
        for (int j = 0; j < g.dim(1); ++j)
            for (int i = 0; i < g.dim(0); ++i) {
                const std::size_t idx = g.index(i, j, k);
                m.set_mapped(idx, g.coord(i, j, k) + disp.vector_at(idx));
            }
    return m;
}

VectorField displacement_from_map(const InverseMap& map) {
    const Grid& g = map.grid();
    VectorField d(g);
    for (int k = 0; k < g.dim(2); ++k)
        for (int j = 0; j < g.dim(1); ++j)
            for (int i = 0; i < g.dim(0); ++i) {
                const std::size_t idx = g.index(i, j, k);
                d.set_vector(idx, map.mapped_at(idx) - g.coord(i, j, k));
            }
    return d;
}

void write_map(const InverseMap& map, const std::string& path) {
    write_vector_field(displacement_from_map(map), path,
                       "inverse map stored as displacement from identity (mm)");
}

InverseMap read_map(const std::string& path) { return map_from_displacement(read_vector_field(path)); }

}  // namespace avocado
