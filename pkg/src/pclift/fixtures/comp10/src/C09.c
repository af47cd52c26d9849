extern bool FC;
extern bool FD;
extern int g89;
int g910 = 0;

int c9helper() {
    return 9;
}
int c9recv() {
    if (g89 > 0) {
        return c9helper();
    }
    return 0;
}
int c9send(int k) {
    if (FC) {
        if (FD) {
            g910 += k;
        }
    }
    return 0;
}
