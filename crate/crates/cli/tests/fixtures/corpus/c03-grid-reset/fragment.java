for (int i = 0; i < rows; i++) {
    for (int j = 0; j < cols; j++) {
        cells[i][j] = 0;
    }
}
