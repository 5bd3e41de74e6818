#pragma once

#include <string>
#include <string_view>

namespace takens::svg {

/// Minimal standalone SVG writer. Coordinates are printed with two decimals
/// so output bytes depend only on the drawn content.
class Document
{
public:
    Document(double width, double height);

    void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none");
    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0);
    void circle(double cx, double cy, double r, std::string_view fill, double opacity = 1.0);
    void text(double x, double y, std::string_view content, double size = 12.0, std::string_view anchor = "start",
              double rotate = 0.0);
    /// Points as "x,y x,y ...".
    void polyline(std::string_view points, std::string_view stroke, double width = 1.0);

    void begin_group(std::string_view attributes);
    void end_group();

    [[nodiscard]] std::string str() const;

private:
    double width_;
    double height_;
    std::string body_;
};

[[nodiscard]] std::string escape(std::string_view text);

} // namespace takens::svg
