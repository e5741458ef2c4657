#include "roomtex/mesh.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "roomtex/errors.hpp"

namespace roomtex {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

Vec3 face_normal(const TriMesh& m, int f) {
    const auto& t = m.faces[f];
    Vec3 n = cross(m.vertices[t[1]] - m.vertices[t[0]], m.vertices[t[2]] - m.vertices[t[0]]);
    double len = norm(n);
    if (len <= 0) return {0, 0, 0};
    return n * (1.0 / len);
}

Vec3 face_centroid(const TriMesh& m, int f) {
    const auto& t = m.faces[f];
    return (m.vertices[t[0]] + m.vertices[t[1]] + m.vertices[t[2]]) * (1.0 / 3.0);
}

double face_area(const TriMesh& m, int f) {
    const auto& t = m.faces[f];
    return 0.5 * norm(cross(m.vertices[t[1]] - m.vertices[t[0]],
                            m.vertices[t[2]] - m.vertices[t[0]]));
}

double surface_area(const TriMesh& m) {
    double s = 0;
    for (size_t f = 0; f < m.faces.size(); ++f) s += face_area(m, static_cast<int>(f));
    return s;
}

void validate_mesh(const TriMesh& m) {
    if (m.faceLabels.size() != m.faces.size())
        throw MalformedData("face label count does not match face count");
    if (!m.texcoords.empty() && m.texcoords.size() != m.vertices.size())
        throw MalformedData("texcoord count does not match vertex count");
    int n = static_cast<int>(m.vertices.size());
    for (size_t f = 0; f < m.faces.size(); ++f) {
        for (int v : m.faces[f])
            if (v < 0 || v >= n) throw MalformedData("face index out of range");
        if (face_area(m, static_cast<int>(f)) <= 1e-12)
            throw MalformedData("degenerate face (area <= 1e-12)");
    }
}

// ---------------------------------------------------------------- OBJ

void save_obj(const std::string& path, const TriMesh& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const Vec3& v : m.vertices)
        out << "v " << fmt_double(v.x) << ' ' << fmt_double(v.y) << ' ' << fmt_double(v.z) << '\n';
    bool tex = !m.texcoords.empty();
    if (tex)
        for (const Vec2& t : m.texcoords)
            out << "vt " << fmt_double(t.x) << ' ' << fmt_double(t.y) << '\n';
    for (const auto& f : m.faces) {
        out << 'f';
        for (int v : f) {
            out << ' ' << (v + 1);
            if (tex) out << '/' << (v + 1);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

TriMesh load_obj(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    TriMesh m;
    std::vector<Vec2> rawTex;
    std::vector<int> texOf;  // per-vertex texcoord index, -1 if none
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) throw MalformedData("bad vertex line in " + path);
            m.vertices.push_back(v);
            texOf.push_back(-1);
        } else if (tag == "vt") {
            Vec2 t;
            if (!(ls >> t.x >> t.y)) throw MalformedData("bad texcoord line in " + path);
            rawTex.push_back(t);
        } else if (tag == "f") {
            std::vector<int> vi, ti;
            std::string tok;
            while (ls >> tok) {
                // forms: v, v/vt, v//vn, v/vt/vn
                size_t sl1 = tok.find('/');
                std::string vPart = sl1 == std::string::npos ? tok : tok.substr(0, sl1);
                int v = std::stoi(vPart);
                int n = static_cast<int>(m.vertices.size());
                v = v > 0 ? v - 1 : n + v;  // negative indices are relative
                if (v < 0 || v >= n) throw MalformedData("face index out of range in " + path);
                vi.push_back(v);
                int t = -1;
                if (sl1 != std::string::npos) {
                    size_t sl2 = tok.find('/', sl1 + 1);
                    std::string tPart = tok.substr(sl1 + 1, sl2 == std::string::npos
                                                               ? std::string::npos
                                                               : sl2 - sl1 - 1);
                    if (!tPart.empty()) {
                        t = std::stoi(tPart);
                        int nt = static_cast<int>(rawTex.size());
                        t = t > 0 ? t - 1 : nt + t;
                        if (t < 0 || t >= nt)
                            throw MalformedData("texcoord index out of range in " + path);
                    }
                }
                ti.push_back(t);
            }
            if (vi.size() < 3) throw MalformedData("face with fewer than 3 vertices in " + path);
            for (size_t k = 0; k < vi.size(); ++k)
                if (ti[k] >= 0) texOf[vi[k]] = ti[k];
            for (size_t k = 2; k < vi.size(); ++k) {
                m.faces.push_back({vi[0], vi[static_cast<int>(k) - 1], vi[static_cast<int>(k)]});
                m.faceLabels.push_back(kObjectLabel);
            }
        }
    }
    bool anyTex = false;
    for (int t : texOf) anyTex |= t >= 0;
    if (anyTex) {
        m.texcoords.resize(m.vertices.size(), {0, 0});
        for (size_t v = 0; v < m.vertices.size(); ++v)
            if (texOf[v] >= 0) m.texcoords[v] = rawTex[texOf[v]];
    }
    return m;
}

// ---------------------------------------------------------------- PLY

void save_ply(const std::string& path, const TriMesh& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    bool tex = !m.texcoords.empty();
    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << m.vertices.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    if (tex) out << "property double s\nproperty double t\n";
    out << "element face " << m.faces.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    for (size_t i = 0; i < m.vertices.size(); ++i) {
        double row[5] = {m.vertices[i].x, m.vertices[i].y, m.vertices[i].z, 0, 0};
        int n = 3;
        if (tex) {
            row[3] = m.texcoords[i].x;
            row[4] = m.texcoords[i].y;
            n = 5;
        }
        out.write(reinterpret_cast<const char*>(row), n * sizeof(double));
    }
    for (const auto& f : m.faces) {
        uint8_t cnt = 3;
        int32_t idx[3] = {f[0], f[1], f[2]};
        out.write(reinterpret_cast<const char*>(&cnt), 1);
        out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
    }
    if (!out) throw IoError("write failed: " + path);
}

namespace {

struct PlyProp {
    std::string name;
    std::string type;      // scalar type, or the value type for lists
    std::string countType;  // non-empty for list properties
};

size_t scalar_size(const std::string& t) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
        t == "float32")
        return 4;
    if (t == "double" || t == "float64") return 8;
    throw MalformedData("unsupported ply property type: " + t);
}

double read_scalar(std::istream& in, const std::string& t) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), scalar_size(t));
    if (!in) throw MalformedData("truncated ply data");
    if (t == "double" || t == "float64") {
        double v;
        std::memcpy(&v, buf, 8);
        return v;
    }
    if (t == "float" || t == "float32") {
        float v;
        std::memcpy(&v, buf, 4);
        return v;
    }
    if (t == "char" || t == "int8") return static_cast<int8_t>(buf[0]);
    if (t == "uchar" || t == "uint8") return buf[0];
    if (t == "short" || t == "int16") {
        int16_t v;
        std::memcpy(&v, buf, 2);
        return v;
    }
    if (t == "ushort" || t == "uint16") {
        uint16_t v;
        std::memcpy(&v, buf, 2);
        return v;
    }
    if (t == "int" || t == "int32") {
        int32_t v;
        std::memcpy(&v, buf, 4);
        return v;
    }
    uint32_t v;
    std::memcpy(&v, buf, 4);
    return v;
}

}  // namespace

TriMesh load_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || (line != "ply" && line != "ply\r"))
        throw MalformedData("not a ply file: " + path);

    struct Elem {
        std::string name;
        size_t count = 0;
        std::vector<PlyProp> props;
    };
    std::vector<Elem> elems;
    bool binaryLE = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "comment") continue;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            binaryLE = fmt == "binary_little_endian";
            if (!binaryLE) throw MalformedData("only binary_little_endian ply is supported");
        } else if (tag == "element") {
            Elem e;
            ls >> e.name >> e.count;
            elems.push_back(e);
        } else if (tag == "property") {
            if (elems.empty()) throw MalformedData("property before element in " + path);
            PlyProp p;
            std::string kind;
            ls >> kind;
            if (kind == "list") {
                ls >> p.countType >> p.type >> p.name;
            } else {
                p.type = kind;
                ls >> p.name;
            }
            elems.back().props.push_back(p);
        } else if (tag == "end_header") {
            break;
        }
    }

    TriMesh m;
    for (const Elem& e : elems) {
        if (e.name == "vertex") {
            int xi = -1, yi = -1, zi = -1, si = -1, ti = -1;
            for (size_t p = 0; p < e.props.size(); ++p) {
                if (!e.props[p].countType.empty())
                    throw MalformedData("list property on vertices in " + path);
                if (e.props[p].name == "x") xi = static_cast<int>(p);
                if (e.props[p].name == "y") yi = static_cast<int>(p);
                if (e.props[p].name == "z") zi = static_cast<int>(p);
                if (e.props[p].name == "s") si = static_cast<int>(p);
                if (e.props[p].name == "t") ti = static_cast<int>(p);
            }
            if (xi < 0 || yi < 0 || zi < 0) throw MalformedData("vertex without x/y/z in " + path);
            std::vector<double> row(e.props.size());
            for (size_t i = 0; i < e.count; ++i) {
                for (size_t p = 0; p < e.props.size(); ++p)
                    row[p] = read_scalar(in, e.props[p].type);
                m.vertices.push_back({row[xi], row[yi], row[zi]});
                if (si >= 0 && ti >= 0) m.texcoords.push_back({row[si], row[ti]});
            }
        } else if (e.name == "face") {
            const PlyProp* list = nullptr;
            for (const PlyProp& p : e.props)
                if (!p.countType.empty() &&
                    (p.name == "vertex_indices" || p.name == "vertex_index"))
                    list = &p;
            if (!list || e.props.size() != 1)
                throw MalformedData("unsupported face layout in " + path);
            for (size_t i = 0; i < e.count; ++i) {
                int cnt = static_cast<int>(read_scalar(in, list->countType));
                std::vector<int> vi;
                for (int k = 0; k < cnt; ++k)
                    vi.push_back(static_cast<int>(read_scalar(in, list->type)));
                if (cnt < 3) throw MalformedData("face with fewer than 3 vertices in " + path);
                for (int v : vi)
                    if (v < 0 || v >= static_cast<int>(m.vertices.size()))
                        throw MalformedData("face index out of range in " + path);
                for (int k = 2; k < cnt; ++k) {
                    m.faces.push_back({vi[0], vi[k - 1], vi[k]});
                    m.faceLabels.push_back(kObjectLabel);
                }
            }
        } else {
            // Skip unknown fixed-size elements; lists make the stride unknown.
            size_t stride = 0;
            for (const PlyProp& p : e.props) {
                if (!p.countType.empty())
                    throw MalformedData("cannot skip list element '" + e.name + "' in " + path);
                stride += scalar_size(p.type);
            }
            in.seekg(static_cast<std::streamoff>(stride * e.count), std::ios::cur);
        }
    }
    return m;
}

// ---------------------------------------------------------------- labels

void save_labels(const std::string& path, const std::vector<int>& faceLabels) {
    nlohmann::json arr = nlohmann::json::array();
    for (int l : faceLabels) {
        if (l == kObjectLabel)
            arr.push_back("object");
        else
            arr.push_back(nlohmann::json{{"structure", l}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << arr.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

std::vector<int> load_labels(const std::string& path, size_t expectedFaces) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedData("bad label json in " + path + ": " + e.what());
    }
    if (!arr.is_array() || arr.size() != expectedFaces)
        throw MalformedData("label count mismatch in " + path);
    std::vector<int> labels;
    for (const auto& v : arr) {
        if (v.is_string() && v.get<std::string>() == "object") {
            labels.push_back(kObjectLabel);
        } else if (v.is_object() && v.contains("structure") &&
                   v["structure"].is_number_integer()) {
            labels.push_back(v["structure"].get<int>());
        } else {
            throw MalformedData("bad label entry in " + path);
        }
    }
    return labels;
}

}  // namespace roomtex
