#include "skysearch/region_lang.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include "skysearch/error.hpp"

namespace skysearch::lang {

namespace {

struct Token {
    enum class Kind { Keyword, Number, End };
    Kind kind = Kind::End;
    std::string word;  // upper-cased keyword
    double number = 0.0;
    std::size_t offset = 0;
};

bool isSpace(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool isDigit(char c) { return c >= '0' && c <= '9'; }
bool isAlpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && isSpace(text_[pos_])) {
            ++pos_;
        }
        Token t;
        t.offset = pos_;
        if (pos_ == text_.size()) {
            return t;
        }
        const char c = text_[pos_];
        if (isAlpha(c)) {
            std::size_t end = pos_;
            while (end < text_.size() && (isAlpha(text_[end]) || isDigit(text_[end]) || text_[end] == '_')) {
                ++end;
            }
            t.kind = Token::Kind::Keyword;
            t.word.reserve(end - pos_);
            for (std::size_t i = pos_; i < end; ++i) {
                t.word.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(text_[i]))));
            }
            pos_ = end;
            return t;
        }
        if (isDigit(c) || c == '+' || c == '-' || c == '.') {
            t.kind = Token::Kind::Number;
            t.number = lexNumber();
            return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

private:
    // [+-]? (digits [. digits?] | . digits) ([eE] [+-]? digits)?
    double lexNumber() {
        const std::size_t start = pos_;
        std::size_t p = pos_;
        bool negative = false;
        if (text_[p] == '+' || text_[p] == '-') {
            negative = text_[p] == '-';
            ++p;
        }
        const std::size_t mantissaStart = p;
        std::size_t digits = 0;
        while (p < text_.size() && isDigit(text_[p])) {
            ++p;
            ++digits;
        }
        if (p < text_.size() && text_[p] == '.') {
            ++p;
            while (p < text_.size() && isDigit(text_[p])) {
                ++p;
                ++digits;
            }
        }
        if (digits == 0) {
            throw ParseError("malformed number", start);
        }
        if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
            std::size_t q = p + 1;
            if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) {
                ++q;
            }
            if (q == text_.size() || !isDigit(text_[q])) {
                throw ParseError("malformed exponent", start);
            }
            while (q < text_.size() && isDigit(text_[q])) {
                ++q;
            }
            p = q;
        }
        if (p < text_.size() && !isSpace(text_[p])) {
            throw ParseError("malformed number", start);
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + mantissaStart, text_.data() + p, value);
        if (ec != std::errc() || ptr != text_.data() + p || !std::isfinite(value)) {
            throw ParseError("number out of range", start);
        }
        pos_ = p;
        return negative ? -value : value;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { advance(); }

    RegionSpecAst parse() {
        if (cur_.kind != Token::Kind::Keyword) {
            fail("expected CIRCLE, RECT, POLY, CHULL, CONVEX or REGION");
        }
        const std::string word = cur_.word;
        RegionSpecAst out;
        if (word == "CIRCLE") {
            advance();
            out = parseCircle();
        } else if (word == "RECT") {
            advance();
            out = parseRect();
        } else if (word == "POLY") {
            advance();
            const Frame frame = parseFrame();
            out = PolySpec{frame, parsePoints(frame, "POLY")};
        } else if (word == "CHULL") {
            advance();
            const Frame frame = parseFrame();
            out = HullSpec{frame, parsePoints(frame, "CHULL")};
        } else if (word == "CONVEX") {
            advance();
            out = parseConvexBody();
        } else if (word == "REGION") {
            advance();
            out = parseRegion();
        } else {
            fail("unknown shape '" + word + "'; expected CIRCLE, RECT, POLY, CHULL, CONVEX or REGION");
        }
        if (cur_.kind != Token::Kind::End) {
            fail("expected end of input");
        }
        return out;
    }

private:
    struct NumberAt {
        double value;
        std::size_t offset;
    };

    void advance() { cur_ = lexer_.next(); }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, cur_.offset); }

    Frame parseFrame() {
        if (cur_.kind != Token::Kind::Keyword) {
            fail("expected frame J2000 or CARTESIAN");
        }
        Frame f;
        if (cur_.word == "J2000") {
            f = Frame::J2000;
        } else if (cur_.word == "CARTESIAN") {
            f = Frame::Cartesian;
        } else {
            fail("unknown frame '" + cur_.word + "'; expected J2000 or CARTESIAN");
        }
        advance();
        return f;
    }

    // Offset to blame for a wrong count: the first surplus number, or the
    // token where a missing number should have been.
    std::size_t arityOffset(const std::vector<NumberAt>& nums, std::size_t want) const {
        return nums.size() > want ? nums[want].offset : cur_.offset;
    }

    std::vector<NumberAt> parseNumbers() {
        std::vector<NumberAt> out;
        while (cur_.kind == Token::Kind::Number) {
            out.push_back({cur_.number, cur_.offset});
            advance();
        }
        return out;
    }

    static void checkDec(const NumberAt& dec) {
        if (dec.value < -90.0 || dec.value > 90.0) {
            throw ParseError("declination outside [-90, 90]", dec.offset);
        }
    }

    SpecPoint makePoint(Frame frame, const std::vector<NumberAt>& nums, std::size_t at) const {
        if (frame == Frame::J2000) {
            checkDec(nums[at + 1]);
            return {nums[at].value, nums[at + 1].value, 0.0};
        }
        return {nums[at].value, nums[at + 1].value, nums[at + 2].value};
    }

    CircleSpec parseCircle() {
        const Frame frame = parseFrame();
        const auto nums = parseNumbers();
        const std::size_t want = frame == Frame::J2000 ? 3 : 4;
        if (nums.size() != want) {
            throw ParseError("CIRCLE expects " + std::to_string(want) + " numbers, got " + std::to_string(nums.size()),
                             arityOffset(nums, want));
        }
        const NumberAt& radius = nums.back();
        if (radius.value < 0.0 || radius.value > 180.0 * 60.0) {
            throw ParseError("circle radius must lie in [0, 10800] arcminutes", radius.offset);
        }
        return {frame, makePoint(frame, nums, 0), radius.value};
    }

    RectSpec parseRect() {
        const std::size_t frameAt = cur_.offset;
        if (parseFrame() != Frame::J2000) {
            throw ParseError("RECT supports only the J2000 frame", frameAt);
        }
        const auto nums = parseNumbers();
        if (nums.size() != 4) {
            throw ParseError("RECT expects exactly 2 corners (4 numbers), got " + std::to_string(nums.size()),
                             arityOffset(nums, 4));
        }
        return {makePoint(Frame::J2000, nums, 0), makePoint(Frame::J2000, nums, 2)};
    }

    std::vector<SpecPoint> parsePoints(Frame frame, const char* shape) {
        const std::size_t start = cur_.offset;
        const auto nums = parseNumbers();
        const std::size_t per = frame == Frame::J2000 ? 2 : 3;
        if (nums.size() % per != 0) {
            throw ParseError(std::string(shape) + " coordinates must come in groups of " + std::to_string(per), start);
        }
        if (nums.size() / per < 3) {
            throw ParseError(std::string(shape) + " needs at least 3 points, got " + std::to_string(nums.size() / per),
                             start);
        }
        std::vector<SpecPoint> pts;
        for (std::size_t i = 0; i < nums.size(); i += per) {
            pts.push_back(makePoint(frame, nums, i));
        }
        return pts;
    }

    // Inside REGION an empty CONVEX (the whole sphere) is allowed so that every Region serializes.
    ConvexSpec parseConvexBody(bool allowEmpty = false) {
        const std::size_t start = cur_.offset;
        const auto nums = parseNumbers();
        if ((nums.empty() && !allowEmpty) || nums.size() % 4 != 0) {
            throw ParseError("CONVEX expects one or more 'x y z d' groups", start);
        }
        ConvexSpec c;
        for (std::size_t i = 0; i < nums.size(); i += 4) {
            if (nums[i + 3].value < -1.0 || nums[i + 3].value > 1.0) {
                throw ParseError("constraint length d outside [-1, 1]", nums[i + 3].offset);
            }
            if (nums[i].value == 0.0 && nums[i + 1].value == 0.0 && nums[i + 2].value == 0.0) {
                throw ParseError("constraint normal is the zero vector", nums[i].offset);
            }
            c.constraints.push_back({nums[i].value, nums[i + 1].value, nums[i + 2].value, nums[i + 3].value});
        }
        return c;
    }

    RegionSpec parseRegion() {
        RegionSpec r;
        while (cur_.kind == Token::Kind::Keyword && cur_.word == "CONVEX") {
            advance();
            r.convexes.push_back(parseConvexBody(true));
        }
        if (cur_.kind != Token::Kind::End) {
            fail("expected CONVEX or end of input");
        }
        return r;
    }

    Lexer lexer_;
    Token cur_;
};

UnitVec3 toUnit(Frame frame, const SpecPoint& p) {
    if (frame == Frame::J2000) {
        return skyToVec(SkyPoint(p.a, p.b));
    }
    return UnitVec3::normalize({p.a, p.b, p.c});
}

std::vector<UnitVec3> toUnits(Frame frame, const std::vector<SpecPoint>& pts) {
    std::vector<UnitVec3> out;
    out.reserve(pts.size());
    for (const SpecPoint& p : pts) {
        out.push_back(toUnit(frame, p));
    }
    return out;
}

constexpr double kDegenerate = 1e-15;
constexpr double kSideTolerance = 1e-12;

Region compileCircle(const CircleSpec& c) {
    return Region::single(circleToHalfSpace(toUnit(c.frame, c.center), ArcAngle::arcminutes(c.radiusArcMin)));
}

Region compileRect(const RectSpec& r) {
    const double raLo = std::min(normalizeRa(r.corner1.a), normalizeRa(r.corner2.a));
    const double raHi = std::max(normalizeRa(r.corner1.a), normalizeRa(r.corner2.a));
    const double decLo = std::min(r.corner1.b, r.corner2.b);
    const double decHi = std::max(r.corner1.b, r.corner2.b);
    if (raHi - raLo >= 180.0) {
        throw GeometryError("RECT ra width must be below 180 degrees");
    }
    const double a = raLo * kDegToRad;
    const double b = raHi * kDegToRad;
    Convex c;
    c.constraints.emplace_back(UnitVec3::normalize({0, 0, 1}), std::sin(decLo * kDegToRad));
    c.constraints.emplace_back(UnitVec3::normalize({0, 0, -1}), -std::sin(decHi * kDegToRad));
    c.constraints.emplace_back(UnitVec3::normalize({-std::sin(a), std::cos(a), 0}), 0.0);
    c.constraints.emplace_back(UnitVec3::normalize({std::sin(b), -std::cos(b), 0}), 0.0);
    return Region{{c}};
}

// Edges become great-circle half-spaces through the origin, oriented so the
// vertex centroid is inside. A polygon whose centroid sits on every edge
// plane (all vertices on one great circle, as in the north-eastern quarter
// "0 0 0 90 180 0") has every ordinary edge on that one plane; the interior
// is then the side whose plane normal has its first non-zero component
// positive, which does not depend on vertex order.
Region compilePoly(const PolySpec& spec) {
    const std::vector<UnitVec3> v = toUnits(spec.frame, spec.points);
    const std::size_t n = v.size();
    Vec3 sum;
    for (const UnitVec3& p : v) {
        sum += p.vec();
    }
    if (sum.norm() < 1e-12) {
        throw GeometryError("non-convex or over-wide polygon");
    }
    const Vec3 centroid = sum * (1.0 / sum.norm());

    std::vector<Vec3> normals(n);
    std::vector<bool> fixedSide(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = v[i].vec();
        const Vec3& b = v[(i + 1) % n].vec();
        if ((a - b).norm() < kDegenerate) {
            throw GeometryError("polygon has a zero-length edge (duplicate adjacent vertices)");
        }
        Vec3 e = a.cross(b);
        if (e.norm() < kDegenerate) {
            // Antipodal endpoints: take the great circle through them that faces the other vertices.
            Vec3 others = sum - a - b;
            Vec3 w = others - a * others.dot(a);
            if (w.norm() < 1e-12) {
                throw GeometryError("polygon edge between antipodal vertices is undetermined");
            }
            normals[i] = w * (1.0 / w.norm());
            fixedSide[i] = true;
            continue;
        }
        normals[i] = e * (1.0 / e.norm());
    }

    int orientation = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (fixedSide[i]) {
            continue;
        }
        const double s = normals[i].dot(centroid);
        if (std::abs(s) <= kSideTolerance) {
            continue;
        }
        const int sign = s > 0.0 ? 1 : -1;
        if (orientation != 0 && sign != orientation) {
            throw GeometryError("non-convex or over-wide polygon");
        }
        orientation = sign;
    }
    if (orientation == 0) {
        orientation = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (fixedSide[i]) {
                continue;
            }
            const Vec3& m = normals[i];
            const double lead = std::abs(m.x) > kSideTolerance ? m.x : (std::abs(m.y) > kSideTolerance ? m.y : m.z);
            orientation = lead > 0.0 ? 1 : -1;
            break;
        }
    }

    Convex c;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 normal = fixedSide[i] ? normals[i] : normals[i] * static_cast<double>(orientation);
        for (const UnitVec3& p : v) {
            if (normal.dot(p.vec()) < -kSideTolerance) {
                throw GeometryError("non-convex or over-wide polygon");
            }
        }
        c.constraints.emplace_back(UnitVec3::normalize(normal), 0.0);
    }
    return Region{{c}};
}

// Spherical convex hull: a great circle through two input points bounds the
// hull when every input point lies on one side of it.
Region compileHull(const HullSpec& spec) {
    std::vector<UnitVec3> pts;
    for (const UnitVec3& p : toUnits(spec.frame, spec.points)) {
        const bool dup = std::any_of(pts.begin(), pts.end(),
                                     [&](const UnitVec3& q) { return (q.vec() - p.vec()).norm() < kDegenerate; });
        if (!dup) {
            pts.push_back(p);
        }
    }
    if (pts.size() < 3) {
        throw GeometryError("CHULL needs at least 3 distinct points");
    }

    std::vector<Vec3> facets;
    bool planar = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            Vec3 e = pts[i].vec().cross(pts[j].vec());
            if (e.norm() < kDegenerate) {
                continue;
            }
            e = e * (1.0 / e.norm());
            bool anyAbove = false;
            bool anyBelow = false;
            for (const UnitVec3& p : pts) {
                const double s = e.dot(p.vec());
                anyAbove = anyAbove || s > kSideTolerance;
                anyBelow = anyBelow || s < -kSideTolerance;
            }
            if (anyAbove && anyBelow) {
                continue;
            }
            if (!anyAbove && !anyBelow) {
                planar = true;
                continue;
            }
            const Vec3 facet = anyAbove ? e : -e;
            const bool seen = std::any_of(facets.begin(), facets.end(),
                                          [&](const Vec3& f) { return (f - facet).norm() < 1e-12; });
            if (!seen) {
                facets.push_back(facet);
            }
        }
    }
    if (facets.empty()) {
        throw GeometryError(planar ? "CHULL points lie on one great circle"
                                   : "CHULL points span more than a hemisphere");
    }

    // The hull must fit in an open hemisphere: some w with w . p > 0 for every point.
    Vec3 sum;
    for (const UnitVec3& p : pts) {
        sum += p.vec();
    }
    std::vector<Vec3> probes;
    if (sum.norm() > 1e-12) {
        probes.push_back(sum * (1.0 / sum.norm()));
    }
    probes.insert(probes.end(), facets.begin(), facets.end());
    const bool inHemisphere = std::any_of(probes.begin(), probes.end(), [&](const Vec3& w) {
        return std::all_of(pts.begin(), pts.end(), [&](const UnitVec3& p) { return w.dot(p.vec()) > 0.0; });
    });
    if (!inHemisphere) {
        throw GeometryError("CHULL points span more than a hemisphere");
    }

    Convex c;
    for (const Vec3& f : facets) {
        c.constraints.emplace_back(UnitVec3::normalize(f), 0.0);
    }
    return Region{{c}};
}

HalfSpace compileConstraint(const ConstraintSpec& s) { return HalfSpace(UnitVec3::normalize({s.x, s.y, s.z}), s.d); }

Convex compileConvex(const ConvexSpec& spec) {
    Convex c;
    for (const ConstraintSpec& s : spec.constraints) {
        c.constraints.push_back(compileConstraint(s));
    }
    return c;
}

void appendNumber(std::string& out, double v) {
    std::array<char, 32> buf{};
    if (v == 0.0) {
        v = 0.0;  // drop the sign of negative zero
    }
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.push_back(' ');
    out.append(buf.data(), ptr);
}

}  // namespace

RegionSpecAst parseRegionSpec(std::string_view text) { return Parser(text).parse(); }

Region compileToRegion(const RegionSpecAst& ast) {
    struct Visitor {
        Region operator()(const CircleSpec& c) const { return compileCircle(c); }
        Region operator()(const RectSpec& r) const { return compileRect(r); }
        Region operator()(const PolySpec& p) const { return compilePoly(p); }
        Region operator()(const HullSpec& h) const { return compileHull(h); }
        Region operator()(const ConvexSpec& c) const { return Region{{compileConvex(c)}}; }
        Region operator()(const RegionSpec& r) const {
            Region out;
            for (const ConvexSpec& c : r.convexes) {
                out.convexes.push_back(compileConvex(c));
            }
            return out;
        }
    };
    return std::visit(Visitor{}, ast);
}

Region regionFromString(std::string_view text) { return compileToRegion(parseRegionSpec(text)); }

std::string serializeRegion(const Region& r) {
    std::string out = "REGION";
    for (const Convex& c : r.convexes) {
        out += " CONVEX";
        for (const HalfSpace& h : c.constraints) {
            appendNumber(out, h.normal().x());
            appendNumber(out, h.normal().y());
            appendNumber(out, h.normal().z());
            appendNumber(out, h.l());
        }
    }
    return out;
}

}  // namespace skysearch::lang
