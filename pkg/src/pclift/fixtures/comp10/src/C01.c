extern bool FA;
extern bool FB;
extern int g21;
int g12 = 0;
int g12b = 0;
int g13 = 0;

int c1update(int k) {
    if (FA) {
        if (!FB) {
            g12 += k;
        }
        if (FB) {
            g12b += k;
        }
        g13 += k;
    }
    return 0;
}
int c1helper() {
    return 1;
}
int c1recv() {
    if (g21 > 0) {
        return c1helper();
    }
    return 0;
}
