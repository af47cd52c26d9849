enum FeatSet { Feat0, Feat1 };
extern const enum FeatSet MODE;
extern int g35;
extern int g45;
int g56 = 0;

int c5helper() {
    return 5;
}
int c5recv() {
    if (g35 > 2) {
        return c5helper();
    }
    if (g45 > 2) {
        return c5helper();
    }
    return 0;
}
int c5send(int k) {
    switch (MODE) {
        case Feat0:
            g56 += k;
            break;
        default:
            break;
    }
    return 0;
}
