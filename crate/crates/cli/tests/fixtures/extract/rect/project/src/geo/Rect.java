package geo;

public class Rect {
    private final String label;

    public Rect(String label) {
        this.label = label;
    }

    public String label() {
        return label;
    }

    public String describe(double w, double h) {
        StringBuilder sb = new StringBuilder(label);
        sb.append(": ");
        sb.append(w).append(" x ").append(h);
        double diagonal = Math.sqrt(w * w + h * h);
        double perimeter = 2 * (w + h);
        double ratio = diagonal / perimeter;
        sb.append(", ratio ");
        sb.append(ratio);
        if (ratio > 0.5) {
            sb.append(" (long)");
        }
        return sb.toString();
    }

    public double area(double w, double h) {
        return w * h;
    }

    public boolean isSquare(double w, double h) {
        return Math.abs(w - h) < 1e-9;
    }

    public double score(double w, double h) {
        double area = w * h;
        double penalty = area > 100 ? 1.5 : 1.0;
        double diagonal = Math.sqrt(w * w + h * h);
        double perimeter = 2 * (w + h);
        double ratio = diagonal / perimeter;
        return ratio * penalty;
    }
}
