public double area(Shape shape, double scale) {
    double w = shape.width * scale;
    double h = shape.height;
    double result = w * h;
    return result;
}
