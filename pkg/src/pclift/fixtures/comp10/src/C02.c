extern bool FB;
extern bool FC;
extern bool FE;
extern int g12;
extern int g12b;
int g21 = 0;
int g24 = 0;

int c2helper() {
    return 1;
}
int c2helper2() {
    return 2;
}
int c2recv() {
    if (g12 > 3) {
        return c2helper();
    }
    return 0;
}
int c2recv2() {
    if (g12b > 3) {
        return c2helper2();
    }
    return 0;
}
int c2back(int k) {
    if (FE) {
        g21 += k;
    }
    return 0;
}
int c2send(int k) {
    if (FB || FC) {
        g24 += k;
    }
    return 0;
}
