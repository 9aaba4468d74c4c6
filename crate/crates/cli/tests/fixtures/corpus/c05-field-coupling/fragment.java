String value = entries.get(key);
if (value == null) {
    misses++;
} else {
    hits++;
}
