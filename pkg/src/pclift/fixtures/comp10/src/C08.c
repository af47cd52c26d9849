extern bool FE;
extern int g78;
int g89 = 0;

int c8helper() {
    return 8;
}
int c8recv() {
    if (g78 > 0) {
        return c8helper();
    }
    return 0;
}
int c8send(int k) {
    if (FE) {
        k = 0;
    } else {
        g89 += k;
    }
    return 0;
}
