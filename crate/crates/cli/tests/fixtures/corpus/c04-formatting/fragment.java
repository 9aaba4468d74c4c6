int max = Integer.MIN_VALUE;
for (int v : values) {
    if (v > max) {
        max = v;
    }
}
