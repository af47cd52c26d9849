extern int g13;
int g35 = 0;

int c3helper() {
    return 3;
}
int c3recv() {
    if (g13 > 1) {
        return c3helper();
    }
    return 0;
}
int c3send(int k) {
    g35 += k;
    return 0;
}
