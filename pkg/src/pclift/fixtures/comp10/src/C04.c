extern bool FC;
extern int g24;
int g45 = 0;

int c4helper() {
    return 4;
}
int c4recv() {
    if (g24 != 0) {
        return c4helper();
    }
    return 0;
}
int c4send(int k) {
    if (FC) {
        g45 += k;
    }
    return 0;
}
