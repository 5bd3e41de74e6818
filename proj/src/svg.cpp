#include "takens/svg.hpp"

#include <fmt/format.h>

namespace takens::svg {

std::string escape(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke)
{
    body_ += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" stroke=\"{}\"/>\n",
                         x, y, w, h, fill, stroke);
}

void Document::line(double x1, double y1, double x2, double y2, std::string_view stroke, double width)
{
    body_ += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"{:.2f}\"/>\n", x1, y1,
        x2, y2, stroke, width);
}

void Document::circle(double cx, double cy, double r, std::string_view fill, double opacity)
{
    if (opacity < 1.0) {
        body_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"{}\" fill-opacity=\"{:.2f}\"/>\n",
                             cx, cy, r, fill, opacity);
    } else {
        body_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"{}\"/>\n", cx, cy, r, fill);
    }
}

void Document::text(double x, double y, std::string_view content, double size, std::string_view anchor,
                    double rotate)
{
    if (rotate != 0.0) {
        body_ += fmt::format(
            "<text x=\"{0:.2f}\" y=\"{1:.2f}\" font-size=\"{2:.1f}\" text-anchor=\"{3}\" "
            "transform=\"rotate({4:.1f} {0:.2f} {1:.2f})\">{5}</text>\n",
            x, y, size, anchor, rotate, escape(content));
    } else {
        body_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"{:.1f}\" text-anchor=\"{}\">{}</text>\n", x,
                             y, size, anchor, escape(content));
    }
}

void Document::polyline(std::string_view points, std::string_view stroke, double width)
{
    body_ += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.2f}\"/>\n", points,
                         stroke, width);
}

void Document::begin_group(std::string_view attributes) { body_ += fmt::format("<g {}>\n", attributes); }

void Document::end_group() { body_ += "</g>\n"; }

std::string Document::str() const
{
    return fmt::format("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                       "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
                       "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\">\n"
                       "{2}</svg>\n",
                       width_, height_, body_);
}

} // namespace takens::svg
