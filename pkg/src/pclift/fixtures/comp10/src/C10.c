extern int g910;

int c10helper() {
    return 10;
}
int c10recv() {
    if (g910 > 5) {
        return c10helper();
    }
    return 0;
}
